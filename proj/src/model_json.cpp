#include "wqad/model_json.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "wqad/error.hpp"

namespace wqad {

namespace {
constexpr const char* kFormat = "wqad-model";
constexpr int kVersion = 1;
}  // namespace

std::string model_to_json(const forecast::ForecastModel& model,
                          const forecast::FitDiagnostics* diagnostics) {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["kind"] = forecast::to_string(model.kind);
    doc["order"] = {model.p, model.d, model.q};
    doc["include_constant"] = model.include_constant;
    doc["constant"] = model.constant;
    doc["phi"] = model.phi;
    doc["theta"] = model.theta;
    doc["beta"] = model.beta;
    doc["s"] = model.s;
    doc["T"] = model.T;
    doc["k_params"] = model.k_params;
    doc["training_transform"] = forecast::to_string(model.training_transform);
    if (diagnostics != nullptr) {
        doc["diagnostics"] = {
            {"aic", diagnostics->aic},
            {"rss", diagnostics->rss},
            {"ljung_box_Q", diagnostics->ljung_box_Q},
            {"ljung_box_pvalue", diagnostics->ljung_box_pvalue},
            {"pacf", diagnostics->pacf},
        };
    }
    return doc.dump(2) + "\n";
}

forecast::ForecastModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("model JSON: {}", e.what()));
    }
    try {
        if (doc.value("format", std::string{}) != kFormat) {
            throw Error(ErrorCode::Parse, "model JSON: missing or wrong 'format'");
        }
        const int version = doc.at("version").get<int>();
        if (version != kVersion) {
            throw Error(ErrorCode::InvalidConfig,
                        fmt::format("model JSON version {} is not supported", version));
        }
        forecast::ForecastModel m;
        m.kind = forecast::parse_model_kind(doc.at("kind").get<std::string>());
        const auto order = doc.at("order").get<std::vector<int>>();
        if (order.size() != 3) throw Error(ErrorCode::Parse, "model JSON: 'order' needs 3 entries");
        m.p = order[0];
        m.d = order[1];
        m.q = order[2];
        m.include_constant = doc.at("include_constant").get<bool>();
        m.constant = doc.at("constant").get<double>();
        m.phi = doc.at("phi").get<std::vector<double>>();
        m.theta = doc.at("theta").get<std::vector<double>>();
        m.beta = doc.at("beta").get<std::vector<double>>();
        m.s = doc.at("s").get<double>();
        m.T = doc.at("T").get<std::size_t>();
        m.k_params = doc.at("k_params").get<int>();
        m.training_transform = forecast::parse_transform(doc.at("training_transform").get<std::string>());
        if (m.p < 0 || m.d < 0 || m.q < 0 || static_cast<int>(m.phi.size()) != m.p ||
            static_cast<int>(m.theta.size()) != m.q || !(m.s > 0.0) || m.k_params < 1) {
            throw Error(ErrorCode::Parse, "model JSON: inconsistent model fields");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("model JSON: {}", e.what()));
    }
}

void save_model(const std::filesystem::path& path, const forecast::ForecastModel& model,
                const forecast::FitDiagnostics* diagnostics) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    out << model_to_json(model, diagnostics);
    if (!out) throw Error(ErrorCode::Io, fmt::format("write failed for '{}'", path.string()));
}

forecast::ForecastModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace wqad
