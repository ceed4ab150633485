#include "paradoxlens/report.hpp"

#include "paradoxlens/errors.hpp"
#include "paradoxlens/json_io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

namespace paradoxlens {

namespace {

// Renders a number exactly as nlohmann::json would, so narrative text and
// JSON output carry identical digits.
std::string fmt(double v) {
    return nlohmann::json(v).dump();
}

} // namespace

ReportBundle analyze(const Dataset& ds, const AnalysisOptions& options) {
    require_both_groups(ds, "analyze");

    ReportBundle bundle;
    bundle.overlap = support_overlap(ds);
    const BinningSpec binning = options.binning.value_or(default_binning(ds));
    bundle.decomposition = compute_a2(ds, binning);
    bundle.supermodel = run_supermodel(ds);
    bundle.diagnostics =
        residual_diagnostics(ds, bundle.supermodel.submodel, binning, options.diagnostics);
    bundle.narrative = render_narrative(bundle);
    return bundle;
}

std::string render_narrative(const ReportBundle& bundle) {
    const auto& dec = bundle.decomposition;
    const auto& sup = bundle.supermodel;
    const double group_t = sup.direct.t_statistic("group");
    const bool significant = std::abs(group_t) > 2.0;

    std::ostringstream out;
    out << "Two readings of the same data\n";
    out << "-----------------------------\n";
    out << "Reading 1 (difference of group averages):\n";
    out << "  mean gain difference A1 = " << fmt(dec.a1) << "\n";
    out << "Reading 2 (comparison at fixed initial measure):\n";
    out << "  group coefficient of the upgraded model = " << fmt(sup.composed.group)
        << " (t = " << fmt(group_t) << ", " << (significant ? "|t| > 2" : "|t| <= 2") << ")\n";
    out << "  common slope on w_initial b0 = " << fmt(sup.composed.w_initial) << "\n";
    out << "Confounding:\n";
    out << "  pooled-weighted subgroup difference A2 = " << fmt(dec.a2) << "\n";
    out << "  confounding effect A2 - A1 = " << fmt(dec.confounding_effect) << "\n";
    out << "  subgroup weight divergence = " << fmt(dec.weight_divergence)
        << " (alpha = " << fmt(dec.table.alpha) << ")\n";
    if (!dec.bins_missing_a_group.empty()) {
        out << "  bins excluded for missing a group:";
        for (int b : dec.bins_missing_a_group) out << " " << b;
        out << "\n";
    }
    out << "Support overlap:\n";
    out << "  group 0 w_initial in [" << fmt(bundle.overlap.group0_min) << ", "
        << fmt(bundle.overlap.group0_max) << "], group 1 in ["
        << fmt(bundle.overlap.group1_min) << ", " << fmt(bundle.overlap.group1_max) << "]\n";
    if (bundle.overlap.intersection_empty) {
        out << "  intersection empty; any adjusted comparison extrapolates\n";
    } else {
        out << "  intersection [" << fmt(bundle.overlap.intersection_min) << ", "
            << fmt(bundle.overlap.intersection_max) << "], inside fractions "
            << fmt(bundle.overlap.fraction0_inside) << " / "
            << fmt(bundle.overlap.fraction1_inside)
            << (bundle.overlap.extrapolation_required ? " (extrapolation required)" : "")
            << "\n";
    }
    out << "Model upgrade:\n";
    out << "  composed coefficients match the direct joint fit to relative "
        << fmt(sup.max_composition_delta) << "\n";
    out << "  SSE " << fmt(sup.sse_submodel) << " -> " << fmt(sup.sse_supermodel) << "\n";
    out << "  null scenario detected: " << (sup.null_scenario.detected() ? "yes" : "no")
        << " (per-group mean gains " << fmt(sup.null_scenario.mean_gain0) << ", "
        << fmt(sup.null_scenario.mean_gain1) << ")\n";
    out << "Residual diagnostics: " << verdict_name(bundle.diagnostics.overall) << "\n";
    out << "Resolution:\n";
    out << "  Reading 1 compares whole-group averages; reading 2 compares subjects at\n";
    out << "  the same initial measure. When the initial-measure distributions differ\n";
    out << "  between groups (divergence above), the two numbers answer different\n";
    out << "  questions and can disagree without contradiction. Read coefficients as\n";
    out << "  predictive; a causal reading additionally needs the initial measure to be\n";
    out << "  the only confounder and the supports to coincide.\n";
    return out.str();
}

nlohmann::json bundle_to_json(const ReportBundle& bundle) {
    return nlohmann::json{{"overlap", bundle.overlap},
                          {"decomposition", bundle.decomposition},
                          {"supermodel", bundle.supermodel},
                          {"diagnostics", bundle.diagnostics},
                          {"narrative", bundle.narrative}};
}

} // namespace paradoxlens
