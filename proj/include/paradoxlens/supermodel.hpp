#pragma once

#include "paradoxlens/dataset.hpp"
#include "paradoxlens/ols.hpp"

#include <vector>

namespace paradoxlens {

// Regression of the sub-model residuals on {group0, group1, w_initial}:
// two intercepts, one common slope.
struct ResidualStageFit {
    double a0 = 0.0;    // group-0 residual intercept
    double a1 = 0.0;    // group-1 residual intercept
    double b0 = 0.0;    // common slope on w_initial
    std::vector<double> stage_residuals;   // second-stage residuals
    FitResult fit;                         // full OLS detail of the stage

    // Separate-slopes refit, reported only: the common-slope assumption is
    // the user's to judge.
    double slope_gap = 0.0;
    double slope_gap_se = 0.0;
    double slope_gap_t = 0.0;

    std::uint64_t dataset_fingerprint = 0;
};

struct ComposedCoefficients {
    double intercept = 0.0;   // mu_G + a0
    double group = 0.0;       // (mu_B - mu_G) - a0 + a1
    double w_initial = 0.0;   // b0
};

struct NullScenarioFlags {
    // Per group: |mean(gain)| within 3 standard errors of zero, i.e. the
    // final-measure mean is statistically indistinguishable from the initial.
    bool group0 = false;
    bool group1 = false;
    double mean_gain0 = 0.0;
    double mean_gain1 = 0.0;
    double threshold0 = 0.0;
    double threshold1 = 0.0;
    bool detected() const { return group0 && group1; }
};

struct SupermodelReport {
    FitResult submodel;                 // w_final ~ {intercept, group}
    ResidualStageFit stage;
    ComposedCoefficients composed;
    FitResult direct;                   // w_final ~ {intercept, group, w_initial}
    std::vector<double> composition_deltas;   // per-coefficient |composed - direct|
    double max_composition_delta = 0.0;       // relative to the coefficient scale
    double sse_submodel = 0.0;
    double sse_supermodel = 0.0;
    NullScenarioFlags null_scenario;
};

// Regression of w_final on the group indicator alone. Coefficients are the
// group-0 mean and the between-group mean difference.
FitResult fit_submodel(const Dataset& ds);

// Models the sub-model residuals linearly in w_initial with per-group
// intercepts and a common slope.
ResidualStageFit fit_residual_stage(const Dataset& ds, const FitResult& submodel);

// Assembles the super-model coefficients from the two stages and verifies
// them against an independently computed direct joint fit.
SupermodelReport compose(const Dataset& ds, const FitResult& submodel,
                         const ResidualStageFit& stage);

// Convenience: submodel -> residual stage -> composition in one call.
SupermodelReport run_supermodel(const Dataset& ds);

struct PredictionImprovement {
    double sse_sub = 0.0;
    double sse_super = 0.0;
};

// Sum of squared errors before and after the upgrade; never worse after.
PredictionImprovement prediction_improvement(const Dataset& ds, const SupermodelReport& report);

} // namespace paradoxlens
