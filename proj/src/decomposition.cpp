#include "paradoxlens/decomposition.hpp"

#include "paradoxlens/errors.hpp"

#include <cmath>

namespace paradoxlens {

double compute_a1(const Dataset& ds) {
    require_both_groups(ds, "compute_a1");
    double sum0 = 0.0, sum1 = 0.0;
    for (const auto& obs : ds.observations()) {
        if (obs.group == 1) sum1 += obs.gain;
        else sum0 += obs.gain;
    }
    return sum1 / ds.group_count(1) - sum0 / ds.group_count(0);
}

SubgroupTable build_subgroup_table(const Dataset& ds, const BinAssignment& assignment) {
    const int bins = assignment.bin_count();
    SubgroupTable table;
    table.bins.resize(static_cast<std::size_t>(bins));
    const auto centers = assignment.centers();

    std::vector<double> gain_sum_1(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> gain_sum_0(static_cast<std::size_t>(bins), 0.0);
    const auto& rows = ds.observations();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& bin = table.bins[static_cast<std::size_t>(assignment.bin_of[i])];
        if (rows[i].group == 1) {
            ++bin.n1;
            gain_sum_1[static_cast<std::size_t>(assignment.bin_of[i])] += rows[i].gain;
        } else {
            ++bin.n0;
            gain_sum_0[static_cast<std::size_t>(assignment.bin_of[i])] += rows[i].gain;
        }
    }

    const double total1 = static_cast<double>(ds.group_count(1));
    const double total0 = static_cast<double>(ds.group_count(0));
    const double total = total1 + total0;
    table.alpha = total1 / total;
    for (int b = 0; b < bins; ++b) {
        auto& bin = table.bins[static_cast<std::size_t>(b)];
        bin.center = centers[static_cast<std::size_t>(b)];
        bin.mean_gain_1 = bin.n1 > 0 ? gain_sum_1[static_cast<std::size_t>(b)] / bin.n1 : 0.0;
        bin.mean_gain_0 = bin.n0 > 0 ? gain_sum_0[static_cast<std::size_t>(b)] / bin.n0 : 0.0;
        bin.f1 = total1 > 0.0 ? bin.n1 / total1 : 0.0;
        bin.f0 = total0 > 0.0 ? bin.n0 / total0 : 0.0;
        bin.f = (bin.n1 + bin.n0) / total;
    }
    return table;
}

Decomposition compute_a2(const Dataset& ds, const BinningSpec& spec) {
    require_both_groups(ds, "compute_a2");
    const auto assignment = assign_bins(ds, spec);
    Decomposition result;
    result.table = build_subgroup_table(ds, assignment);
    result.a1 = compute_a1(ds);

    double retained_weight = 0.0;
    double weighted_sum = 0.0;
    for (std::size_t b = 0; b < result.table.bins.size(); ++b) {
        const auto& bin = result.table.bins[b];
        if (bin.n1 > 0 && bin.n0 > 0) {
            retained_weight += bin.f;
            weighted_sum += (bin.mean_gain_1 - bin.mean_gain_0) * bin.f;
        } else {
            result.bins_missing_a_group.push_back(static_cast<int>(b));
        }
    }
    if (retained_weight <= 0.0) {
        throw NoOverlapError(
            "no covariate bin contains both groups; the adjusted comparison is undefined "
            "without extrapolation");
    }
    result.a2 = weighted_sum / retained_weight;
    result.confounding_effect = result.a2 - result.a1;
    result.weight_divergence = weight_divergence(result.table);
    return result;
}

std::vector<EffectCurvePoint> conditional_effect_curve(const Dataset& ds, const BinningSpec& spec) {
    const Decomposition decomposition = compute_a2(ds, spec);
    double retained_weight = 0.0;
    for (const auto& bin : decomposition.table.bins) {
        if (bin.n1 > 0 && bin.n0 > 0) retained_weight += bin.f;
    }
    std::vector<EffectCurvePoint> curve;
    for (const auto& bin : decomposition.table.bins) {
        if (bin.n1 > 0 && bin.n0 > 0) {
            curve.push_back({bin.center, bin.mean_gain_1 - bin.mean_gain_0,
                             bin.f / retained_weight});
        }
    }
    return curve;
}

double weight_divergence(const SubgroupTable& table) {
    double sum = 0.0;
    for (const auto& bin : table.bins) sum += std::abs(bin.f1 - bin.f0);
    return 0.5 * sum;
}

} // namespace paradoxlens
