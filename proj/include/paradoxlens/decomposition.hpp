#pragma once

#include "paradoxlens/dataset.hpp"

#include <vector>

namespace paradoxlens {

struct SubgroupBin {
    double center = 0.0;
    int n1 = 0;                 // group-1 count in the bin
    int n0 = 0;                 // group-0 count in the bin
    double mean_gain_1 = 0.0;   // 0 when the group is absent from the bin
    double mean_gain_0 = 0.0;
    double f1 = 0.0;            // n1 / total group-1 count
    double f0 = 0.0;            // n0 / total group-0 count
    double f = 0.0;             // (n1 + n0) / n, the pooled weight
};

// Per-bin subgroup weights and gain means. The pooled weight is the mixture
// f = alpha * f1 + (1 - alpha) * f0 with alpha the group-1 share.
struct SubgroupTable {
    std::vector<SubgroupBin> bins;
    double alpha = 0.0;
};

struct Decomposition {
    double a1 = 0.0;                    // difference of group mean gains
    double a2 = 0.0;                    // pooled-weighted difference of subgroup means
    double confounding_effect = 0.0;    // a2 - a1
    double weight_divergence = 0.0;     // total variation distance between f1 and f0
    SubgroupTable table;
    std::vector<int> bins_missing_a_group;   // excluded from a2, f renormalized
};

// Difference of the group mean gains; the unadjusted comparison.
double compute_a1(const Dataset& ds);

// Weighted difference of per-bin mean gains using the pooled bin weights.
// Bins where one group is absent are excluded and the pooled weights are
// renormalized over the retained bins; exclusions are always reported.
Decomposition compute_a2(const Dataset& ds, const BinningSpec& spec);

struct EffectCurvePoint {
    double bin_center = 0.0;
    double difference = 0.0;    // mean_gain_1 - mean_gain_0 in the bin
    double weight = 0.0;        // renormalized pooled weight
};

// Per-bin conditional differences over bins containing both groups; their
// weight-weighted sum reproduces a2.
std::vector<EffectCurvePoint> conditional_effect_curve(const Dataset& ds, const BinningSpec& spec);

// Total variation distance between the two subgroup weight vectors, in [0,1];
// zero exactly when the covariate distribution is identical across groups.
double weight_divergence(const SubgroupTable& table);

// Table construction shared by the operations above.
SubgroupTable build_subgroup_table(const Dataset& ds, const BinAssignment& assignment);

} // namespace paradoxlens
