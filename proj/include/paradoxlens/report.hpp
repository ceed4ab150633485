#pragma once

#include "paradoxlens/dataset.hpp"
#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/diagnostics.hpp"
#include "paradoxlens/supermodel.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace paradoxlens {

struct AnalysisOptions {
    std::optional<BinningSpec> binning;   // default_binning(ds) if empty
    DiagnosticsConfig diagnostics;
};

// Everything the two statisticians would each report, side by side.
struct ReportBundle {
    OverlapReport overlap;
    Decomposition decomposition;
    SupermodelReport supermodel;
    DiagnosticsReport diagnostics;
    std::string narrative;
};

ReportBundle analyze(const Dataset& ds, const AnalysisOptions& options = {});

// Plain-text rendering; every number is taken from the structured fields.
std::string render_narrative(const ReportBundle& bundle);

nlohmann::json bundle_to_json(const ReportBundle& bundle);

} // namespace paradoxlens
