#include "paradoxlens/json_io.hpp"

#include <nlohmann/json.hpp>

namespace paradoxlens {

using nlohmann::json;

void to_json(json& j, const OverlapReport& r) {
    j = json{{"group0_range", {r.group0_min, r.group0_max}},
             {"group1_range", {r.group1_min, r.group1_max}},
             {"intersection_empty", r.intersection_empty},
             {"fraction0_inside", r.fraction0_inside},
             {"fraction1_inside", r.fraction1_inside},
             {"extrapolation_required", r.extrapolation_required}};
    if (!r.intersection_empty) {
        j["intersection"] = {r.intersection_min, r.intersection_max};
    } else {
        j["intersection"] = nullptr;
    }
}

void to_json(json& j, const FitResult& r) {
    j = json{{"response", r.response},
             {"terms", r.terms},
             {"coef", r.coefficients},
             {"se", r.standard_errors},
             {"t", r.t_statistics},
             {"r2", r.r_squared},
             {"resid_var", r.residual_variance},
             {"n", r.n}};
}

void to_json(json& j, const SubgroupBin& b) {
    j = json{{"center", b.center},
             {"n1", b.n1},
             {"n0", b.n0},
             {"mean_gain_1", b.mean_gain_1},
             {"mean_gain_0", b.mean_gain_0},
             {"f1", b.f1},
             {"f0", b.f0},
             {"f", b.f}};
}

void to_json(json& j, const Decomposition& d) {
    j = json{{"a1", d.a1},
             {"a2", d.a2},
             {"confounding_effect", d.confounding_effect},
             {"weight_divergence", d.weight_divergence},
             {"alpha", d.table.alpha},
             {"bins", d.table.bins},
             {"excluded_bins", d.bins_missing_a_group}};
}

void to_json(json& j, const EffectCurvePoint& p) {
    j = json{{"center", p.bin_center}, {"difference", p.difference}, {"weight", p.weight}};
}

void to_json(json& j, const ResidualStageFit& s) {
    j = json{{"a0", s.a0},
             {"a1", s.a1},
             {"b0", s.b0},
             {"slope_gap", s.slope_gap},
             {"slope_gap_se", s.slope_gap_se},
             {"slope_gap_t", s.slope_gap_t},
             {"fit", s.fit}};
}

void to_json(json& j, const SupermodelReport& r) {
    j = json{{"submodel", r.submodel},
             {"stage", r.stage},
             {"composed",
              {{"intercept", r.composed.intercept},
               {"group", r.composed.group},
               {"w_initial", r.composed.w_initial}}},
             {"direct", r.direct},
             {"composition_deltas", r.composition_deltas},
             {"max_composition_delta", r.max_composition_delta},
             {"sse_submodel", r.sse_submodel},
             {"sse_supermodel", r.sse_supermodel},
             {"null_scenario",
              {{"detected", r.null_scenario.detected()},
               {"group0", r.null_scenario.group0},
               {"group1", r.null_scenario.group1},
               {"mean_gain0", r.null_scenario.mean_gain0},
               {"mean_gain1", r.null_scenario.mean_gain1},
               {"threshold0", r.null_scenario.threshold0},
               {"threshold1", r.null_scenario.threshold1}}}};
}

void to_json(json& j, const StratumDiagnostics& s) {
    j = json{{"label", s.label},
             {"group", s.group},
             {"n", s.n},
             {"skewness", s.skewness},
             {"symmetry_p", s.symmetry_p},
             {"dip", s.dip},
             {"dip_p", s.dip_p},
             {"verdict", verdict_name(s.verdict)}};
    if (s.bin.has_value()) j["bin"] = *s.bin;
    else j["bin"] = nullptr;
}

void to_json(json& j, const DiagnosticsReport& r) {
    j = json{{"strata", r.strata},
             {"overall", verdict_name(r.overall)},
             {"seed", r.config.seed},
             {"alpha", r.config.alpha},
             {"min_stratum_n", r.config.min_stratum_n},
             {"symmetry_bootstrap", r.config.symmetry_bootstrap},
             {"dip_null_samples", r.config.dip_null_samples}};
}

void to_json(json& j, const GroupVarianceReduction& g) {
    json bins = json::array();
    for (const auto& row : g.bins) {
        bins.push_back(json{{"bin", row.bin},
                            {"n", row.n},
                            {"mean", row.mean},
                            {"variance", row.variance}});
    }
    j = json{{"group", g.group},
             {"marginal_var", g.marginal_var},
             {"avg_conditional_var", g.avg_conditional_var},
             {"reduced", g.reduced},
             {"mixture_mean", g.mixture_mean},
             {"bins", bins}};
}

void to_json(json& j, const VarianceReductionReport& r) {
    j = json{{"group0", r.group0}, {"group1", r.group1}};
}

void to_json(json& j, const NoiseSpec& n) {
    j = json{{"family", noise_family_name(n.family)}};
    if (n.family == NoiseFamily::mixture) {
        j["separation"] = n.separation;
        j["weight"] = n.weight;
    }
}

void to_json(json& j, const ScenarioConfig& c) {
    j = json{{"n0", c.n0},
             {"n1", c.n1},
             {"mu0", c.mu0},
             {"mu1", c.mu1},
             {"sigma", c.sigma},
             {"rho", c.rho},
             {"gain0", c.gain0},
             {"gain1", c.gain1},
             {"noise", c.noise},
             {"seed", c.seed}};
}

void to_json(json& j, const ScenarioTruth& t) {
    j = json{{"true_a1", t.true_a1},
             {"true_ancova_group_coef", t.true_ancova_group_coef},
             {"true_b0", t.true_b0},
             {"true_residual_variance_submodel", t.true_residual_variance_submodel},
             {"true_residual_variance_supermodel", t.true_residual_variance_supermodel},
             {"rng_algorithm", t.rng_algorithm}};
}

void to_json(json& j, const ReplicateSummary& s) {
    auto stat = [](const ReplicateStat& st) {
        return json{{"mean", st.mean}, {"sd", st.sd}};
    };
    j = json{{"replicates", s.replicates},
             {"a1", stat(s.a1)},
             {"a2", stat(s.a2)},
             {"ancova_group_coef", stat(s.ancova_group_coef)},
             {"b0", stat(s.b0)},
             {"composition_delta", stat(s.composition_delta)}};
}

} // namespace paradoxlens
