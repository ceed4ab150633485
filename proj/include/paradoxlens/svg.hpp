#pragma once

#include "paradoxlens/dataset.hpp"

#include <string>

namespace paradoxlens {

struct PlotOptions {
    int width = 860;
    int height = 620;
    std::string title = "final vs initial measure";
};

// Per-group scatter of (w_initial, w_final) with per-group regression lines,
// the identity line and group-mean markers. Output is deterministic for a
// fixed dataset (no timestamps or random ids).
std::string render_scatter_svg(const Dataset& ds, const PlotOptions& options = {});

} // namespace paradoxlens
