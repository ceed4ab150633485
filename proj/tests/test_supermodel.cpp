#include "paradoxlens/supermodel.hpp"

#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/errors.hpp"
#include "paradoxlens/json_io.hpp"
#include "paradoxlens/rng.hpp"
#include "paradoxlens/simulate.hpp"

#include "oracle.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>

using namespace paradoxlens;

namespace {

Dataset two_group_means(double mu_g, double mu_b) {
    std::vector<Observation> rows;
    int i = 0;
    for (double offset : {-2.0, -1.0, 1.0, 2.0}) {
        rows.push_back({"g" + std::to_string(i), 0, 50.0 + i, mu_g + offset, 0.0});
        rows.push_back({"b" + std::to_string(i), 1, 60.0 + i, mu_b + offset, 0.0});
        ++i;
    }
    return Dataset::from_observations(rows);
}

// residuals exactly uncorrelated with w_initial inside each group
Dataset uncorrelated_stage_dataset() {
    std::vector<Observation> rows;
    rows.push_back({"g0", 0, 1.0, 4.0, 0.0});
    rows.push_back({"g1", 0, 2.0, 5.0, 0.0});
    rows.push_back({"g2", 0, 3.0, 4.0, 0.0});
    rows.push_back({"b0", 1, 1.0, 7.0, 0.0});
    rows.push_back({"b1", 1, 2.0, 8.0, 0.0});
    rows.push_back({"b2", 1, 3.0, 7.0, 0.0});
    return Dataset::from_observations(rows);
}

} // namespace

TEST_CASE("submodel coefficients are the group means") {
    const Dataset ds = two_group_means(50.0, 60.0);
    const FitResult submodel = fit_submodel(ds);
    CHECK(submodel.coefficient("intercept") == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(submodel.coefficient("group") == doctest::Approx(10.0).epsilon(1e-12));

    // residuals are deviations from the own-group mean
    const auto& rows = ds.observations();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double group_mean = rows[i].group == 1 ? 60.0 : 50.0;
        CHECK(submodel.residuals[i] ==
              doctest::Approx(rows[i].w_final - group_mean).epsilon(1e-12));
    }
}

TEST_CASE("submodel residuals match the matrix oracle") {
    Rng rng(21);
    const Dataset ds = oracle::random_dataset(rng);
    const FitResult submodel = fit_submodel(ds);
    const std::vector<double> ones(ds.size(), 1.0);
    const auto beta =
        oracle::normal_equations({ones, ds.group_indicator()}, ds.values(Variable::w_final));
    const auto s = ds.group_indicator();
    const auto y = ds.values(Variable::w_final);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double expected = y[i] - beta[0] - beta[1] * s[i];
        CHECK(std::abs(submodel.residuals[i] - expected) < 1e-9);
    }
}

TEST_CASE("null scenario: submodel residuals are predictive by w_initial within groups") {
    ScenarioConfig cfg;   // lord-null defaults
    cfg.seed = 97;
    const auto [ds, truth] = generate(cfg);
    const FitResult submodel = fit_submodel(ds);
    const ResidualStageFit stage = fit_residual_stage(ds, submodel);
    // the common slope is strongly significant
    CHECK(std::abs(stage.fit.t_statistic("w_initial")) > 2.0);
    CHECK(stage.b0 > 0.5);

    // and so is the per-group regression of the residuals on w_initial
    const auto& rows = ds.observations();
    for (int group : {0, 1}) {
        std::vector<double> wi, eps;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].group != group) continue;
            wi.push_back(rows[i].w_initial);
            eps.push_back(submodel.residuals[i]);
        }
        const std::vector<double> ones(wi.size(), 1.0);
        const FitResult per_group =
            fit_columns({"intercept", "w_initial"}, {ones, wi}, eps, "residuals", 0);
        CHECK(std::abs(per_group.t_statistic("w_initial")) > 2.0);
    }
}

TEST_CASE("residual stage with nothing left to explain returns zeros") {
    const Dataset ds = uncorrelated_stage_dataset();
    const FitResult submodel = fit_submodel(ds);
    const ResidualStageFit stage = fit_residual_stage(ds, submodel);
    CHECK(std::abs(stage.b0) < 1e-12);
    CHECK(std::abs(stage.a0) < 1e-12);
    CHECK(std::abs(stage.a1) < 1e-12);

    SUBCASE("identity upgrade keeps the submodel") {
        const SupermodelReport report = compose(ds, submodel, stage);
        CHECK(report.composed.intercept ==
              doctest::Approx(submodel.coefficient("intercept")).epsilon(1e-12));
        CHECK(report.composed.group ==
              doctest::Approx(submodel.coefficient("group")).epsilon(1e-12));
        CHECK(std::abs(report.composed.w_initial) < 1e-12);
        const auto improvement = prediction_improvement(ds, report);
        CHECK(improvement.sse_super ==
              doctest::Approx(improvement.sse_sub).epsilon(1e-12));
    }
}

TEST_CASE("rho = 0.7 scenario recovers b0 near rho") {
    ScenarioConfig cfg;
    cfg.seed = 1234;
    const auto [ds, truth] = generate(cfg);
    const ResidualStageFit stage = fit_residual_stage(ds, fit_submodel(ds));
    CHECK(stage.b0 == doctest::Approx(0.7).epsilon(0.05));
    // common-slope diagnostic: no interaction in the generator
    CHECK(std::abs(stage.slope_gap_t) < 4.0);
}

TEST_CASE("stage residuals have zero mean within each group") {
    Rng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset ds = oracle::random_dataset(rng);
        const ResidualStageFit stage = fit_residual_stage(ds, fit_submodel(ds));
        double sum0 = 0.0, sum1 = 0.0;
        const auto& rows = ds.observations();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            (rows[i].group == 1 ? sum1 : sum0) += stage.stage_residuals[i];
        }
        CHECK(std::abs(sum0 / ds.group_count(0)) < 1e-10);
        CHECK(std::abs(sum1 / ds.group_count(1)) < 1e-10);
    }
}

TEST_CASE("composition reproduces the direct joint fit on random data") {
    Rng rng(47);
    for (int rep = 0; rep < 100; ++rep) {
        const Dataset ds = oracle::random_dataset(rng);
        const SupermodelReport report = run_supermodel(ds);
        CHECK(report.max_composition_delta <= 1e-8);
    }
}

TEST_CASE("lord-null composition shows the paradox in one report") {
    ScenarioConfig cfg;   // mu gap 10, rho 0.7 -> adjusted effect 3
    cfg.seed = 4242;
    const auto [ds, truth] = generate(cfg);
    const SupermodelReport report = run_supermodel(ds);

    // statistician 1: group means of the gain barely differ
    CHECK(std::abs(compute_a1(ds)) < 0.5);
    // statistician 2: the adjusted group coefficient sits near (mu1-mu0)(1-rho)
    CHECK(report.composed.group == doctest::Approx(3.0).epsilon(0.2));
    CHECK(report.submodel.coefficient("group") == doctest::Approx(10.0).epsilon(0.05));
    CHECK(std::abs(report.direct.t_statistic("group")) > 2.0);
    CHECK(report.null_scenario.detected());
}

TEST_CASE("null-scenario flag stays off when a real gain is present") {
    ScenarioConfig cfg;
    cfg.gain1 = 2.0;
    cfg.seed = 4242;
    const auto [ds, truth] = generate(cfg);
    const SupermodelReport report = run_supermodel(ds);
    CHECK(report.null_scenario.group0);
    CHECK_FALSE(report.null_scenario.group1);
    CHECK_FALSE(report.null_scenario.detected());
}

TEST_CASE("prediction improvement") {
    SUBCASE("sse values equal the residual sums of squares") {
        Rng rng(91);
        const Dataset ds = oracle::random_dataset(rng);
        const SupermodelReport report = run_supermodel(ds);
        const auto improvement = prediction_improvement(ds, report);
        double sse_sub = 0.0;
        for (double r : report.submodel.residuals) sse_sub += r * r;
        double sse_super = 0.0;
        for (double r : report.stage.stage_residuals) sse_super += r * r;
        CHECK(improvement.sse_sub == doctest::Approx(sse_sub).epsilon(1e-12));
        CHECK(improvement.sse_super == doctest::Approx(sse_super).epsilon(1e-12));
    }
    SUBCASE("the upgrade never predicts worse") {
        Rng rng(93);
        for (int rep = 0; rep < 30; ++rep) {
            const Dataset ds = oracle::random_dataset(rng);
            const auto improvement = prediction_improvement(ds, run_supermodel(ds));
            CHECK(improvement.sse_super <=
                  improvement.sse_sub + 1e-9 * std::max(1.0, improvement.sse_sub));
        }
    }
    SUBCASE("rho = 0.7 strictly improves") {
        ScenarioConfig cfg;
        cfg.seed = 7;
        const auto [ds, truth] = generate(cfg);
        const auto improvement = prediction_improvement(ds, run_supermodel(ds));
        CHECK(improvement.sse_super < 0.7 * improvement.sse_sub);
    }
}

TEST_CASE("gain and final responses give the same group coefficient") {
    Rng rng(133);
    for (int rep = 0; rep < 25; ++rep) {
        const Dataset ds = oracle::random_dataset(rng);
        DesignSpec final_spec;
        final_spec.response = Variable::w_final;
        final_spec.terms = {Term::intercept, Term::group_indicator, Term::w_initial};
        DesignSpec gain_spec = final_spec;
        gain_spec.response = Variable::gain;
        const FitResult on_final = fit(ds, final_spec);
        const FitResult on_gain = fit(ds, gain_spec);
        CHECK(std::abs(on_final.coefficient("group") - on_gain.coefficient("group")) < 1e-10);
        CHECK(std::abs(on_final.coefficient("w_initial") - on_gain.coefficient("w_initial") -
                       1.0) < 1e-10);
    }
}

TEST_CASE("variance reduction holds per group in law-of-total-variance form") {
    Rng rng(135);
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset ds = oracle::random_dataset(rng, 30, 120);
        const FitResult submodel = fit_submodel(ds);
        const ResidualStageFit stage = fit_residual_stage(ds, submodel);
        const auto assignment = assign_bins(ds, BinningSpec::quantile(4));

        for (int group : {0, 1}) {
            // marginal variance of the first-stage residuals in the group
            std::vector<double> eps1;
            std::vector<std::vector<double>> eps2_by_bin(
                static_cast<std::size_t>(assignment.bin_count()));
            const auto& rows = ds.observations();
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].group != group) continue;
                eps1.push_back(submodel.residuals[i]);
                eps2_by_bin[static_cast<std::size_t>(assignment.bin_of[i])].push_back(
                    stage.stage_residuals[i]);
            }
            const double mean1 =
                std::accumulate(eps1.begin(), eps1.end(), 0.0) / static_cast<double>(eps1.size());
            double var1 = 0.0;
            for (double v : eps1) var1 += (v - mean1) * (v - mean1);
            var1 /= static_cast<double>(eps1.size());

            double avg_cond_var2 = 0.0;
            for (const auto& bin : eps2_by_bin) {
                if (bin.empty()) continue;
                const double mean =
                    std::accumulate(bin.begin(), bin.end(), 0.0) / static_cast<double>(bin.size());
                double var = 0.0;
                for (double v : bin) var += (v - mean) * (v - mean);
                var /= static_cast<double>(bin.size());
                avg_cond_var2 +=
                    var * static_cast<double>(bin.size()) / static_cast<double>(eps1.size());
            }
            CHECK(avg_cond_var2 <= var1 + 1e-10);
        }
    }
}

TEST_CASE("higher moments of the stage-one residuals per group are reported, not asserted") {
    ScenarioConfig cfg;
    cfg.seed = 55;
    const auto [ds, truth] = generate(cfg);
    const FitResult submodel = fit_submodel(ds);
    double mean0 = 0.0, mean1 = 0.0;
    const auto& rows = ds.observations();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        (rows[i].group == 1 ? mean1 : mean0) += submodel.residuals[i];
    }
    mean0 /= ds.group_count(0);
    mean1 /= ds.group_count(1);
    // per-group mean zero is the guaranteed part
    CHECK(std::abs(mean0) < 1e-10);
    CHECK(std::abs(mean1) < 1e-10);
}

TEST_CASE("fingerprint mismatches are rejected") {
    Rng rng(201);
    const Dataset a = oracle::random_dataset(rng);
    const Dataset b = oracle::random_dataset(rng);
    const FitResult submodel_a = fit_submodel(a);
    CHECK_THROWS_WITH_AS(fit_residual_stage(b, submodel_a), doctest::Contains("different dataset"),
                         ValidationError);
    const ResidualStageFit stage_a = fit_residual_stage(a, submodel_a);
    CHECK_THROWS_AS(compose(b, fit_submodel(b), stage_a), ValidationError);
    const SupermodelReport report_a = compose(a, submodel_a, stage_a);
    CHECK_THROWS_AS(prediction_improvement(b, report_a), ValidationError);
}

TEST_CASE("constant covariate within groups makes the stage singular") {
    std::vector<Observation> rows;
    for (int i = 0; i < 4; ++i) {
        rows.push_back({"g" + std::to_string(i), 0, 5.0, 10.0 + i, 0.0});
        rows.push_back({"b" + std::to_string(i), 1, 5.0, 20.0 + i, 0.0});
    }
    const Dataset ds = Dataset::from_observations(rows);
    const FitResult submodel = fit_submodel(ds);
    CHECK_THROWS_AS(fit_residual_stage(ds, submodel), SingularityError);
}

TEST_CASE("supermodel report serializes with composed, direct and flags") {
    Rng rng(301);
    const Dataset ds = oracle::random_dataset(rng);
    const nlohmann::json j = run_supermodel(ds);
    for (const char* key : {"submodel", "stage", "composed", "direct", "composition_deltas",
                            "max_composition_delta", "sse_submodel", "sse_supermodel",
                            "null_scenario"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["composed"].contains("intercept"));
    CHECK(j["composed"].contains("group"));
    CHECK(j["composed"].contains("w_initial"));
    CHECK(j["null_scenario"].contains("detected"));
}
