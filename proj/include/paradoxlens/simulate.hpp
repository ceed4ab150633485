#pragma once

#include "paradoxlens/dataset.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace paradoxlens {

enum class NoiseFamily { gaussian, laplace, mixture };

std::string noise_family_name(NoiseFamily f);

// Final-measure noise. Whatever the family, the draw has mean zero and
// variance sigma^2 * (1 - rho^2) so the scenario's closed forms hold. The
// mixture family is two normals `separation` component-sds apart, there to
// trip the unimodality diagnostic.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian;
    double separation = 6.0;   // mixture: gap between component means, in component sds
    double weight = 0.5;       // mixture: probability of the lower component
};

struct ScenarioConfig {
    int n0 = 2000;             // group-0 size
    int n1 = 2000;             // group-1 size
    double mu0 = 54.0;         // group-0 mean of w_initial
    double mu1 = 64.0;         // group-1 mean of w_initial
    double sigma = 5.0;        // within-group sd of w_initial
    double rho = 0.7;          // regression-to-the-mean coefficient
    double gain0 = 0.0;        // additive true gain, group 0
    double gain1 = 0.0;        // additive true gain, group 1
    NoiseSpec noise;
    std::uint64_t seed = 0;

    void validate() const;
};

// Closed-form targets implied by the generator:
//   w_final = mu_s + rho * (w_initial - mu_s) + gain_s + e.
struct ScenarioTruth {
    double true_a1 = 0.0;                      // gain1 - gain0
    double true_ancova_group_coef = 0.0;       // (mu1 - mu0)(1 - rho) + (gain1 - gain0)
    double true_b0 = 0.0;                      // rho
    double true_residual_variance_submodel = 0.0;    // sigma^2
    double true_residual_variance_supermodel = 0.0;  // sigma^2 (1 - rho^2)
    std::string rng_algorithm;
};

ScenarioTruth scenario_truth(const ScenarioConfig& cfg);

// Deterministic for a fixed config (seed included).
std::pair<Dataset, ScenarioTruth> generate(const ScenarioConfig& cfg);

struct ReplicateStat {
    double mean = 0.0;
    double sd = 0.0;
};

struct ReplicateSummary {
    int replicates = 0;
    ReplicateStat a1;
    ReplicateStat a2;
    ReplicateStat ancova_group_coef;
    ReplicateStat b0;
    ReplicateStat composition_delta;
};

// Runs the full pipeline on `reps` independent substreams of cfg.seed and
// summarizes the recovered quantities.
ReplicateSummary replicate_study(const ScenarioConfig& cfg, int reps);

} // namespace paradoxlens
