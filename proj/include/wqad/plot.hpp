#pragma once

#include <filesystem>
#include <string>

#include "wqad/core.hpp"
#include "wqad/detect.hpp"
#include "wqad/features.hpp"

namespace wqad::plot {

struct PlotOptions {
    int width = 1200;
    int height = 400;
    std::string title;
};

/// One circle per trace observation coloured by confusion class (tn, fn, fp, tp) against
/// `labels`, the prediction-interval band, and ADAM substitutions as separate square marks.
/// Throws Error(EmptyEvaluation) for an empty trace.
[[nodiscard]] std::string trace_svg(const detect::DetectionTrace& trace, const LabelMap& labels,
                                    const PlotOptions& options = {});

/// Score per row over time, coloured by confusion class, with the threshold as a line.
[[nodiscard]] std::string scores_svg(const features::FeatureMatrix& matrix,
                                     const features::OutlierScoreSet& scores, const LabelMap& labels,
                                     const PlotOptions& options = {});

/// Writes an SVG document. Throws Error(Io) on failure.
void emit_plot(const std::filesystem::path& path, const std::string& svg);

}  // namespace wqad::plot
