#pragma once

#include <array>
#include <string>
#include <string_view>

#include "ppkg/cluster.hpp"
#include "ppkg/dimred.hpp"
#include "ppkg/topics.hpp"

namespace ppkg {

/// Categorical palette cycled by cluster label.
inline constexpr std::array<std::string_view, 12> kClusterPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#17becf", "#bcbd22", "#393b79", "#637939", "#843c39"};
inline constexpr std::string_view kNoiseColor = "#9e9e9e";

/// Deterministic SVG scatterplot: one <circle> per node, noise smaller and
/// gray, a legend of cluster ids with their top annotation terms, axes over
/// the data bounds padded by 5%.
std::string render_scatter(const Projection& y, const ClusterAssignment& a, const Annotations& annotations,
                           std::string_view title = "");

std::string xml_escape(std::string_view s);

}  // namespace ppkg
