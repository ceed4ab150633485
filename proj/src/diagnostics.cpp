#include "paradoxlens/diagnostics.hpp"

#include "paradoxlens/errors.hpp"
#include "paradoxlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paradoxlens {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// population-style variance (divide by n); exact under the law of total variance
double population_variance(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (double value : v) ss += (value - mean) * (value - mean);
    return ss / static_cast<double>(v.size());
}

// Bias-adjusted sample skewness: g1 * sqrt(n(n-1)) / (n-2).
double skewness_of(const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    const double mean = mean_of(v);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double value : v) {
        const double d = value - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) return 0.0;
    const double g1 = m3 / std::pow(m2, 1.5);
    if (v.size() < 3) return g1;
    return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

} // namespace

SymmetryResult symmetry_test(const std::vector<double>& values, std::uint64_t seed,
                             int bootstrap_samples) {
    if (values.size() < 3) {
        throw InsufficientDataError("symmetry_test needs at least 3 values");
    }
    const double mean = mean_of(values);
    if (population_variance(values, mean) == 0.0) {
        throw DegenerateError("symmetry_test: sample has zero variance");
    }
    if (bootstrap_samples < 1) {
        throw ConfigError("symmetry_test: bootstrap_samples must be >= 1");
    }

    SymmetryResult result;
    result.skewness = skewness_of(values);
    const double observed = std::abs(result.skewness);

    // Under H0 the centered values have a sign-symmetric distribution, so
    // random sign flips regenerate the null.
    std::vector<double> centered(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) centered[i] = values[i] - mean;

    Rng rng(seed);
    std::vector<double> resample(values.size());
    int at_least = 0;
    for (int b = 0; b < bootstrap_samples; ++b) {
        for (std::size_t i = 0; i < centered.size(); ++i) {
            resample[i] = rng.coin(0.5) ? centered[i] : -centered[i];
        }
        if (std::abs(skewness_of(resample)) >= observed) ++at_least;
    }
    result.p_value = (1.0 + at_least) / (bootstrap_samples + 1.0);
    return result;
}

DipResult unimodality_test(const std::vector<double>& values, std::uint64_t seed,
                           int null_samples) {
    if (values.size() < 10) {
        throw InsufficientDataError("unimodality_test needs at least 10 values, got " +
                                    std::to_string(values.size()));
    }
    if (null_samples < 1) {
        throw ConfigError("unimodality_test: null_samples must be >= 1");
    }
    DipResult result;
    result.dip = dip_statistic(values);

    Rng rng(seed);
    std::vector<double> draw(values.size());
    int at_least = 0;
    for (int b = 0; b < null_samples; ++b) {
        for (double& v : draw) v = rng.uniform();
        if (dip_statistic(draw) >= result.dip) ++at_least;
    }
    result.p_value = (1.0 + at_least) / (null_samples + 1.0);
    return result;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::supports_effect_reading: return "supports_effect_reading";
        case Verdict::violates: return "violates";
        case Verdict::insufficient_n: return "insufficient_n";
    }
    return "?";
}

namespace {

StratumDiagnostics diagnose_stratum(const std::string& label, int group,
                                    std::optional<int> bin, const std::vector<double>& values,
                                    const DiagnosticsConfig& config, std::uint64_t stratum_seed) {
    StratumDiagnostics out;
    out.label = label;
    out.group = group;
    out.bin = bin;
    out.n = static_cast<int>(values.size());

    const int effective_min = std::max(config.min_stratum_n, 10);
    if (out.n < effective_min) {
        out.verdict = Verdict::insufficient_n;
        return out;
    }
    const double mean = mean_of(values);
    if (population_variance(values, mean) == 0.0) {
        // a point mass is trivially symmetric and unimodal
        out.skewness = 0.0;
        out.symmetry_p = 1.0;
        out.dip = 0.0;
        out.dip_p = 1.0;
        out.verdict = Verdict::supports_effect_reading;
        return out;
    }
    const SymmetryResult sym =
        symmetry_test(values, substream_seed(stratum_seed, 0), config.symmetry_bootstrap);
    const DipResult dip =
        unimodality_test(values, substream_seed(stratum_seed, 1), config.dip_null_samples);
    out.skewness = sym.skewness;
    out.symmetry_p = sym.p_value;
    out.dip = dip.dip;
    out.dip_p = dip.p_value;
    out.verdict = (sym.p_value >= config.alpha && dip.p_value >= config.alpha)
                      ? Verdict::supports_effect_reading
                      : Verdict::violates;
    return out;
}

} // namespace

DiagnosticsReport residual_diagnostics(const Dataset& ds, const FitResult& fit,
                                       const BinningSpec& spec, const DiagnosticsConfig& config) {
    if (fit.dataset_fingerprint != ds.fingerprint()) {
        throw ValidationError("residual_diagnostics: fit comes from a different dataset");
    }
    if (fit.residuals.size() != ds.size()) {
        throw ValidationError("residual_diagnostics: residual count mismatch");
    }
    const auto assignment = assign_bins(ds, spec);
    const auto& rows = ds.observations();

    DiagnosticsReport report;
    report.config = config;

    std::uint64_t stratum_index = 0;
    for (int group : {0, 1}) {
        std::vector<double> group_residuals;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].group == group) group_residuals.push_back(fit.residuals[i]);
        }
        report.strata.push_back(diagnose_stratum(
            "group" + std::to_string(group), group, std::nullopt, group_residuals, config,
            substream_seed(config.seed, stratum_index++)));

        for (int b = 0; b < assignment.bin_count(); ++b) {
            std::vector<double> stratum_values;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].group == group && assignment.bin_of[i] == b) {
                    stratum_values.push_back(fit.residuals[i]);
                }
            }
            report.strata.push_back(diagnose_stratum(
                "group" + std::to_string(group) + "/bin" + std::to_string(b), group, b,
                stratum_values, config, substream_seed(config.seed, stratum_index++)));
        }
    }

    // Per-stratum verdicts use the raw threshold; the overall verdict applies
    // a Bonferroni familywise threshold so that testing many strata does not
    // flag clean data.
    int tested = 0;
    for (const auto& stratum : report.strata) {
        if (stratum.verdict != Verdict::insufficient_n) ++tested;
    }
    bool any_family_violation = false;
    if (tested > 0) {
        const double family_threshold = config.alpha / tested;
        for (const auto& stratum : report.strata) {
            if (stratum.verdict == Verdict::insufficient_n) continue;
            if (std::min(stratum.symmetry_p, stratum.dip_p) < family_threshold) {
                any_family_violation = true;
            }
        }
    }
    report.overall = tested == 0 ? Verdict::insufficient_n
                                 : (any_family_violation ? Verdict::violates
                                                         : Verdict::supports_effect_reading);
    return report;
}

VarianceReductionReport variance_reduction_check(const Dataset& ds, const FitResult& submodel,
                                                 const BinningSpec& spec) {
    require_both_groups(ds, "variance_reduction_check");
    if (submodel.dataset_fingerprint != ds.fingerprint()) {
        throw ValidationError("variance_reduction_check: fit comes from a different dataset");
    }
    const auto assignment = assign_bins(ds, spec);
    const auto& rows = ds.observations();

    VarianceReductionReport report;
    for (int group : {0, 1}) {
        GroupVarianceReduction& out = group == 0 ? report.group0 : report.group1;
        out.group = group;

        std::vector<double> group_residuals;
        std::vector<std::vector<double>> by_bin(static_cast<std::size_t>(assignment.bin_count()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].group != group) continue;
            group_residuals.push_back(submodel.residuals[i]);
            by_bin[static_cast<std::size_t>(assignment.bin_of[i])].push_back(submodel.residuals[i]);
        }
        const double group_mean = mean_of(group_residuals);
        out.marginal_var = population_variance(group_residuals, group_mean);

        const auto group_n = static_cast<double>(group_residuals.size());
        double conditional = 0.0;
        double mixture_mean = 0.0;
        for (std::size_t b = 0; b < by_bin.size(); ++b) {
            if (by_bin[b].empty()) continue;
            const double p = static_cast<double>(by_bin[b].size()) / group_n;
            const double bin_mean = mean_of(by_bin[b]);
            const double bin_var = population_variance(by_bin[b], bin_mean);
            conditional += p * bin_var;
            mixture_mean += p * bin_mean;
            out.bins.push_back({static_cast<int>(b), static_cast<int>(by_bin[b].size()),
                                bin_mean, bin_var});
        }
        out.avg_conditional_var = conditional;
        out.mixture_mean = mixture_mean;
        out.reduced = conditional <= out.marginal_var + 1e-10;
    }
    return report;
}

} // namespace paradoxlens
