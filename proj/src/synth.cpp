#include "wqad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "wqad/error.hpp"

namespace wqad::synth {

std::string_view to_string(BaseKind k) noexcept {
    switch (k) {
        case BaseKind::RandomWalk: return "random-walk";
        case BaseKind::AR1: return "ar1";
        case BaseKind::Seasonal: return "seasonal";
    }
    return "unknown";
}

BaseKind parse_base_kind(std::string_view text) {
    if (text == "random-walk") return BaseKind::RandomWalk;
    if (text == "ar1") return BaseKind::AR1;
    if (text == "seasonal") return BaseKind::Seasonal;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown base kind '{}'", text));
}

void BaseParams::validate(BaseKind kind) const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidConfig, "sigma must be >= 0");
    if (kind != BaseKind::RandomWalk && !(std::abs(phi) < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, fmt::format("phi {} must satisfy |phi| < 1", phi));
    }
    if (kind == BaseKind::Seasonal && !(season_period > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "season_period must be positive");
    }
    if (interval_seconds <= 0) throw Error(ErrorCode::InvalidConfig, "interval_seconds must be positive");
    if (!std::isfinite(level) || !std::isfinite(drift)) throw Error(ErrorCode::InvalidConfig, "non-finite level or drift");
}

SeriesFrame generate_base(BaseKind kind, const BaseParams& params, std::size_t n, std::uint64_t seed,
                          std::string name) {
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "series length must be positive");
    params.validate(kind);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    SeriesFrame frame;
    frame.name = std::move(name);
    frame.observations.reserve(n);
    double u = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double e = params.sigma * noise(rng);
        if (kind == BaseKind::RandomWalk) {
            u = t == 0 ? 0.0 : u + params.drift + e;
        } else {
            u = t == 0 ? e / std::sqrt(1.0 - params.phi * params.phi) : params.phi * u + e;
        }
        double log_value = params.level + u;
        if (kind == BaseKind::Seasonal) {
            log_value += params.season_amplitude *
                         std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / params.season_period);
        }
        frame.observations.push_back(
            {timestamp_from_epoch(params.start_epoch + static_cast<std::int64_t>(t) * params.interval_seconds),
             std::exp(log_value), std::nullopt});
    }
    return frame;
}

namespace {

/// Indices an injection touches, including the survivor labelled by K.
std::pair<std::size_t, std::size_t> footprint(const Injection& inj) {
    const std::size_t extra = inj.type_code == TypeCode::K ? 1 : 0;
    return {inj.start, inj.start + inj.length + extra};
}

}  // namespace

void validate_plan(const InjectionPlan& plan, std::size_t series_length) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const auto& inj : plan.injections) {
        if (inj.length == 0) {
            throw Error(ErrorCode::Plan, fmt::format("{} injection at {} has zero length",
                                                     to_char(inj.type_code), inj.start));
        }
        const auto [lo, hi] = footprint(inj);
        if (hi > series_length) {
            throw Error(ErrorCode::Plan,
                        fmt::format("{} injection [{}, {}) exceeds series length {}", to_char(inj.type_code), lo,
                                    hi, series_length));
        }
        if (inj.type_code == TypeCode::K && inj.start == 0) {
            throw Error(ErrorCode::Plan, "K injection cannot start at index 0");
        }
        spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first < spans[i - 1].second) {
            throw Error(ErrorCode::Plan, fmt::format("injections overlap at index {}", spans[i].first));
        }
    }
}

SeriesFrame inject(const SeriesFrame& frame, const std::vector<Injection>& injections, double sigma) {
    InjectionPlan check;
    check.injections = injections;
    validate_plan(check, frame.size());
    require_valid(frame);

    SeriesFrame out = frame;
    auto& obs = out.observations;
    auto label = [&](std::size_t i, TypeCode code) { out.labels[obs[i].timestamp] = {code, Provenance::GroundTruth}; };
    auto shift_log = [&](std::size_t i, double delta) { obs[i].value *= std::exp(delta); };

    std::set<std::size_t> deleted;
    for (const auto& inj : injections) {
        const std::size_t s = inj.start;
        const std::size_t L = inj.length;
        const double m = inj.magnitude;
        switch (inj.type_code) {
            case TypeCode::A:
            case TypeCode::J:
                for (std::size_t i = s; i < s + L; ++i) {
                    shift_log(i, m * sigma);
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::I:
                // Spikes on alternate points; the points between keep their values but are
                // part of the labelled cluster.
                for (std::size_t i = s; i < s + L; ++i) {
                    if ((i - s) % 2 == 0) shift_log(i, m * sigma);
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::E:
                for (std::size_t i = s; i < s + L; ++i) {
                    shift_log(i, ((i - s) % 2 == 0 ? 1.0 : -1.0) * m * sigma);
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::B: {
                const double held = obs[s].value;
                for (std::size_t i = s; i < s + L; ++i) {
                    obs[i].value = held;
                    label(i, inj.type_code);
                }
                break;
            }
            case TypeCode::C:
            case TypeCode::D:
                for (std::size_t i = s; i < s + L; ++i) {
                    shift_log(i, m * sigma);
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::F:
                for (std::size_t i = s; i < s + L; ++i) {
                    obs[i].value = -std::abs(m);
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::G:
                for (std::size_t i = s; i < s + L; ++i) {
                    obs[i].value = m;
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::H:
                for (std::size_t i = s; i < s + L; ++i) {
                    shift_log(i, m * sigma * static_cast<double>(i - s + 1) / static_cast<double>(L));
                    label(i, inj.type_code);
                }
                break;
            case TypeCode::L: {
                const double half = static_cast<double>(L + 1) / 2.0;
                for (std::size_t i = s; i < s + L; ++i) {
                    const double pos = static_cast<double>(i - s + 1);
                    shift_log(i, m * sigma * (1.0 - std::abs(pos - half) / half));
                    label(i, inj.type_code);
                }
                break;
            }
            case TypeCode::K:
                for (std::size_t i = s; i < s + L; ++i) deleted.insert(i);
                label(s + L, TypeCode::K);
                break;
        }
    }

    if (!deleted.empty()) {
        std::vector<Observation> kept;
        kept.reserve(obs.size() - deleted.size());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (!deleted.contains(i)) kept.push_back(obs[i]);
        }
        obs.swap(kept);
    }
    return out;
}

SeriesFrame realize(const InjectionPlan& plan) {
    SeriesFrame base = generate_base(plan.base_kind, plan.base_params, plan.n, plan.seed, plan.name);
    const double unit = plan.base_params.sigma > 0.0 ? plan.base_params.sigma : 1.0;
    return inject(base, plan.injections, unit);
}

InjectionPlan plan_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        InjectionPlan plan;
        if (doc.contains("base")) {
            const auto& b = doc.at("base");
            plan.base_kind = parse_base_kind(b.value("kind", std::string("ar1")));
            auto& p = plan.base_params;
            p.level = b.value("level", p.level);
            p.drift = b.value("drift", p.drift);
            p.phi = b.value("phi", p.phi);
            p.sigma = b.value("sigma", p.sigma);
            p.season_amplitude = b.value("season_amplitude", p.season_amplitude);
            p.season_period = b.value("season_period", p.season_period);
            p.start_epoch = b.value("start_epoch", p.start_epoch);
            p.interval_seconds = b.value("interval_seconds", p.interval_seconds);
        }
        plan.n = doc.value("n", plan.n);
        plan.seed = doc.value("seed", plan.seed);
        plan.name = doc.value("name", plan.name);
        for (const auto& j : doc.value("injections", nlohmann::json::array())) {
            Injection inj;
            inj.type_code = parse_type_code(j.at("type").get<std::string>());
            inj.start = j.at("start").get<std::size_t>();
            inj.length = j.value("length", std::size_t{1});
            inj.magnitude = j.value("magnitude", inj.magnitude);
            plan.injections.push_back(inj);
        }
        plan.base_params.validate(plan.base_kind);
        validate_plan(plan, plan.n);
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, fmt::format("plan JSON: {}", e.what()));
    }
}

std::string plan_to_json(const InjectionPlan& plan) {
    nlohmann::ordered_json doc;
    const auto& p = plan.base_params;
    doc["base"] = {{"kind", to_string(plan.base_kind)},
                   {"level", p.level},
                   {"drift", p.drift},
                   {"phi", p.phi},
                   {"sigma", p.sigma},
                   {"season_amplitude", p.season_amplitude},
                   {"season_period", p.season_period},
                   {"start_epoch", p.start_epoch},
                   {"interval_seconds", p.interval_seconds}};
    doc["n"] = plan.n;
    doc["seed"] = plan.seed;
    doc["name"] = plan.name;
    doc["injections"] = nlohmann::ordered_json::array();
    for (const auto& inj : plan.injections) {
        doc["injections"].push_back({{"type", std::string(1, to_char(inj.type_code))},
                                     {"start", inj.start},
                                     {"length", inj.length},
                                     {"magnitude", inj.magnitude}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace wqad::synth
