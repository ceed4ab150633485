#include "paradoxlens/supermodel.hpp"

#include "paradoxlens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paradoxlens {

namespace {

void require_same_data(std::uint64_t expected, std::uint64_t actual, const std::string& what) {
    if (expected != actual) {
        throw ValidationError(what + " was fitted on a different dataset (fingerprint mismatch)");
    }
}

NullScenarioFlags detect_null_scenario(const Dataset& ds) {
    NullScenarioFlags flags;
    for (int group : {0, 1}) {
        const auto gains = ds.values(Variable::gain, group);
        const auto n = static_cast<double>(gains.size());
        const double mean = std::accumulate(gains.begin(), gains.end(), 0.0) / n;
        double ss = 0.0;
        for (double g : gains) ss += (g - mean) * (g - mean);
        const double sd = gains.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        const double threshold = 3.0 * sd / std::sqrt(n);
        const bool is_null = std::abs(mean) <= threshold;
        if (group == 0) {
            flags.group0 = is_null;
            flags.mean_gain0 = mean;
            flags.threshold0 = threshold;
        } else {
            flags.group1 = is_null;
            flags.mean_gain1 = mean;
            flags.threshold1 = threshold;
        }
    }
    return flags;
}

} // namespace

FitResult fit_submodel(const Dataset& ds) {
    require_both_groups(ds, "fit_submodel");
    DesignSpec spec;
    spec.response = Variable::w_final;
    spec.terms = {Term::intercept, Term::group_indicator};
    return fit(ds, spec);
}

ResidualStageFit fit_residual_stage(const Dataset& ds, const FitResult& submodel) {
    require_both_groups(ds, "fit_residual_stage");
    require_same_data(ds.fingerprint(), submodel.dataset_fingerprint, "submodel");
    if (submodel.residuals.size() != ds.size()) {
        throw ValidationError("submodel residual count does not match the dataset");
    }

    const auto s = ds.group_indicator();
    std::vector<double> group0(ds.size());
    for (std::size_t i = 0; i < s.size(); ++i) group0[i] = 1.0 - s[i];
    const auto w_initial = ds.values(Variable::w_initial);

    ResidualStageFit stage;
    stage.fit = fit_columns({"group0", "group1", "w_initial"}, {group0, s, w_initial},
                            submodel.residuals, "submodel_residuals", ds.fingerprint());
    stage.a0 = stage.fit.coefficient("group0");
    stage.a1 = stage.fit.coefficient("group1");
    stage.b0 = stage.fit.coefficient("w_initial");
    stage.stage_residuals = stage.fit.residuals;
    stage.dataset_fingerprint = ds.fingerprint();

    // Separate-slopes diagnostic: the w_initial:group1 coefficient is the
    // slope gap between the groups.
    std::vector<double> interaction = w_initial;
    for (std::size_t i = 0; i < interaction.size(); ++i) interaction[i] *= s[i];
    try {
        const FitResult gap_fit =
            fit_columns({"group0", "group1", "w_initial", "w_initial:group1"},
                        {group0, s, w_initial, interaction}, submodel.residuals,
                        "submodel_residuals", ds.fingerprint());
        stage.slope_gap = gap_fit.coefficient("w_initial:group1");
        stage.slope_gap_se = gap_fit.standard_error("w_initial:group1");
        stage.slope_gap_t = gap_fit.t_statistic("w_initial:group1");
    } catch (const Error&) {
        // per-group slope not identifiable (e.g. w_initial constant in a group)
        stage.slope_gap = 0.0;
        stage.slope_gap_se = 0.0;
        stage.slope_gap_t = 0.0;
    }
    return stage;
}

SupermodelReport compose(const Dataset& ds, const FitResult& submodel,
                         const ResidualStageFit& stage) {
    require_same_data(ds.fingerprint(), submodel.dataset_fingerprint, "submodel");
    require_same_data(ds.fingerprint(), stage.dataset_fingerprint, "residual stage");

    SupermodelReport report;
    report.submodel = submodel;
    report.stage = stage;

    const double mu_g = submodel.coefficient("intercept");
    const double group_gap = submodel.coefficient("group");
    report.composed.intercept = mu_g + stage.a0;
    report.composed.group = group_gap - stage.a0 + stage.a1;
    report.composed.w_initial = stage.b0;

    DesignSpec direct_spec;
    direct_spec.response = Variable::w_final;
    direct_spec.terms = {Term::intercept, Term::group_indicator, Term::w_initial};
    report.direct = fit(ds, direct_spec);

    const double composed[3] = {report.composed.intercept, report.composed.group,
                                report.composed.w_initial};
    double scale = 1.0;
    for (double c : report.direct.coefficients) scale = std::max(scale, std::abs(c));
    report.composition_deltas.resize(3);
    double max_delta = 0.0;
    for (int j = 0; j < 3; ++j) {
        report.composition_deltas[static_cast<std::size_t>(j)] =
            std::abs(composed[j] - report.direct.coefficients[static_cast<std::size_t>(j)]);
        max_delta = std::max(max_delta, report.composition_deltas[static_cast<std::size_t>(j)]);
    }
    report.max_composition_delta = max_delta / scale;

    report.sse_submodel = submodel.sse();
    report.sse_supermodel = 0.0;
    for (double r : stage.stage_residuals) report.sse_supermodel += r * r;
    report.null_scenario = detect_null_scenario(ds);
    return report;
}

SupermodelReport run_supermodel(const Dataset& ds) {
    const FitResult submodel = fit_submodel(ds);
    const ResidualStageFit stage = fit_residual_stage(ds, submodel);
    return compose(ds, submodel, stage);
}

PredictionImprovement prediction_improvement(const Dataset& ds, const SupermodelReport& report) {
    require_same_data(ds.fingerprint(), report.submodel.dataset_fingerprint, "report");
    return {report.sse_submodel, report.sse_supermodel};
}

} // namespace paradoxlens
