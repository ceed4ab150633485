#pragma once

#include "paradoxlens/dataset.hpp"
#include "paradoxlens/ols.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace paradoxlens {

// Hartigan's dip: sup distance between the empirical CDF and the nearest
// unimodal CDF, via the greatest-convex-minorant / least-concave-majorant
// iteration. Returns 0 for a point mass.
double dip_statistic(std::vector<double> values);

struct SymmetryResult {
    double skewness = 0.0;   // bias-adjusted sample skewness
    double p_value = 1.0;    // sign-flip bootstrap, H0: symmetric about the mean
};

SymmetryResult symmetry_test(const std::vector<double>& values, std::uint64_t seed,
                             int bootstrap_samples = 2000);

struct DipResult {
    double dip = 0.0;
    double p_value = 1.0;    // Monte Carlo against the uniform null, matched n
};

DipResult unimodality_test(const std::vector<double>& values, std::uint64_t seed,
                           int null_samples = 2000);

enum class Verdict { supports_effect_reading, violates, insufficient_n };

std::string verdict_name(Verdict v);

struct StratumDiagnostics {
    std::string label;
    int group = 0;
    std::optional<int> bin;   // empty for the whole-group stratum
    int n = 0;
    double skewness = 0.0;
    double symmetry_p = 1.0;
    double dip = 0.0;
    double dip_p = 1.0;
    Verdict verdict = Verdict::insufficient_n;
};

struct DiagnosticsConfig {
    std::uint64_t seed = 0;
    double alpha = 0.05;         // p-value threshold for both tests
    int min_stratum_n = 20;      // below this a stratum gets insufficient_n
    int symmetry_bootstrap = 2000;
    int dip_null_samples = 2000;
};

struct DiagnosticsReport {
    std::vector<StratumDiagnostics> strata;
    Verdict overall = Verdict::insufficient_n;
    DiagnosticsConfig config;
};

// Symmetry and unimodality of the fit's residuals, per group and per
// (group, bin) stratum. Any violating stratum makes the overall verdict
// `violates`.
DiagnosticsReport residual_diagnostics(const Dataset& ds, const FitResult& fit,
                                       const BinningSpec& spec,
                                       const DiagnosticsConfig& config = {});

struct GroupVarianceReduction {
    int group = 0;
    double marginal_var = 0.0;          // Var(residual | group), population form
    double avg_conditional_var = 0.0;   // sum over bins of p(bin|group) * Var(residual | bin, group)
    bool reduced = false;               // avg_conditional_var <= marginal_var + 1e-10
    double mixture_mean = 0.0;          // sum of p(bin|group) * mean(residual | bin, group)
    struct BinRow {
        int bin = 0;
        int n = 0;
        double mean = 0.0;
        double variance = 0.0;
    };
    std::vector<BinRow> bins;           // reported without assertion
};

struct VarianceReductionReport {
    GroupVarianceReduction group0;
    GroupVarianceReduction group1;
};

// Law-of-total-variance check on the sub-model residuals: averaging the
// per-bin conditional variances can only reduce the per-group variance.
VarianceReductionReport variance_reduction_check(const Dataset& ds, const FitResult& submodel,
                                                 const BinningSpec& spec);

} // namespace paradoxlens
