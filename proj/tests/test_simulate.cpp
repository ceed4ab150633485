#include "paradoxlens/simulate.hpp"

#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/errors.hpp"
#include "paradoxlens/json_io.hpp"
#include "paradoxlens/ols.hpp"
#include "paradoxlens/supermodel.hpp"

#include "oracle.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>

using namespace paradoxlens;

TEST_CASE("generation is deterministic for a fixed config") {
    ScenarioConfig cfg;
    cfg.n0 = cfg.n1 = 50;
    cfg.seed = 77;
    const auto [a, ta] = generate(cfg);
    const auto [b, tb] = generate(cfg);
    CHECK(a == b);
    CHECK(a.fingerprint() == b.fingerprint());

    cfg.seed = 78;
    const auto [c, tc] = generate(cfg);
    CHECK_FALSE(a == c);
}

TEST_CASE("identity dynamics: rho = 1, zero gains") {
    ScenarioConfig cfg;
    cfg.n0 = cfg.n1 = 40;
    cfg.rho = 1.0;
    cfg.seed = 5;
    const auto [ds, truth] = generate(cfg);
    for (const auto& obs : ds.observations()) {
        CHECK(obs.w_final == obs.w_initial);
        CHECK(obs.gain == 0.0);
    }
    CHECK(compute_a1(ds) == 0.0);
    CHECK(compute_a2(ds, BinningSpec::quantile(3)).a2 == 0.0);
}

TEST_CASE("rho = 1 with a true gain has no paradox") {
    ScenarioConfig cfg;
    cfg.n0 = cfg.n1 = 60;
    cfg.rho = 1.0;
    cfg.gain1 = 2.0;
    cfg.seed = 6;
    const auto [ds, truth] = generate(cfg);
    CHECK(truth.true_a1 == 2.0);
    CHECK(truth.true_ancova_group_coef == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(compute_a1(ds) == doctest::Approx(2.0).epsilon(1e-12));
    DesignSpec spec;
    spec.response = Variable::w_final;
    spec.terms = {Term::intercept, Term::group_indicator, Term::w_initial};
    CHECK(fit(ds, spec).coefficient("group") == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("lord-null scenario closed forms") {
    ScenarioConfig cfg;   // defaults: 54/64, sigma 5, rho 0.7, n 2000/group
    cfg.seed = 99;
    const auto [ds, truth] = generate(cfg);
    CHECK(truth.true_a1 == 0.0);
    CHECK(truth.true_ancova_group_coef == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(truth.true_b0 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(truth.true_residual_variance_submodel == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(truth.true_residual_variance_supermodel ==
          doctest::Approx(25.0 * 0.51).epsilon(1e-12));
    CHECK(truth.rng_algorithm == Rng::algorithm);

    // sample A1 within 3 standard errors of zero
    const double a1 = compute_a1(ds);
    CHECK(std::abs(a1) < 3.0 * 5.0 * std::sqrt(2.0 / 2000.0));

    // fitted ANCOVA near 3, fitted residual variance near the closed forms
    const SupermodelReport report = run_supermodel(ds);
    CHECK(report.direct.coefficient("group") == doctest::Approx(3.0).epsilon(0.2));
    CHECK(report.submodel.sse() / (ds.size() - 2) == doctest::Approx(25.0).epsilon(0.1));
    CHECK(report.direct.sse() / (ds.size() - 3) == doctest::Approx(12.75).epsilon(0.1));

    // per-group E[w_final] = mu + gain
    for (int group : {0, 1}) {
        const auto finals = ds.values(Variable::w_final, group);
        const double mean =
            std::accumulate(finals.begin(), finals.end(), 0.0) / finals.size();
        const double mu = group == 0 ? 54.0 : 64.0;
        CHECK(mean == doctest::Approx(mu).epsilon(0.01));
    }
}

TEST_CASE("noise families match the target variance") {
    for (NoiseFamily family : {NoiseFamily::gaussian, NoiseFamily::laplace, NoiseFamily::mixture}) {
        ScenarioConfig cfg;
        cfg.n0 = cfg.n1 = 4000;
        cfg.noise.family = family;
        cfg.seed = 13;
        const auto [ds, truth] = generate(cfg);
        const SupermodelReport report = run_supermodel(ds);
        const double fitted_var = report.sse_supermodel / (ds.size() - 3);
        CHECK(fitted_var ==
              doctest::Approx(truth.true_residual_variance_supermodel).epsilon(0.1));
    }
}

TEST_CASE("mixture noise is what the dip test flags") {
    ScenarioConfig cfg;
    cfg.n0 = cfg.n1 = 500;
    cfg.noise.family = NoiseFamily::mixture;
    cfg.seed = 3;
    const auto [ds, truth] = generate(cfg);
    const SupermodelReport report = run_supermodel(ds);
    // second-stage residuals inherit the bimodal noise
    const double dip = dip_statistic(report.stage.stage_residuals);
    CHECK(dip > 0.04);
}

TEST_CASE("invalid configs name the failing field") {
    ScenarioConfig cfg;
    cfg.rho = 1.5;
    CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("rho"), ConfigError);
    cfg.rho = 0.5;
    cfg.sigma = 0.0;
    CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("sigma"), ConfigError);
    cfg.sigma = 5.0;
    cfg.n0 = 1;
    CHECK_THROWS_WITH_AS(generate(cfg), doctest::Contains("n0"), ConfigError);
}

TEST_CASE("replicate study") {
    ScenarioConfig cfg;
    cfg.n0 = cfg.n1 = 200;
    cfg.seed = 42;

    SUBCASE("reps = 1 equals the single substream run") {
        const ReplicateSummary summary = replicate_study(cfg, 1);
        ScenarioConfig one = cfg;
        one.seed = substream_seed(cfg.seed, 1);
        const auto [ds, truth] = generate(one);
        CHECK(summary.a1.mean == doctest::Approx(compute_a1(ds)).epsilon(1e-12));
        CHECK(summary.a1.sd == 0.0);
        CHECK(summary.replicates == 1);
    }
    SUBCASE("summaries are reproducible") {
        const ReplicateSummary a = replicate_study(cfg, 8);
        const ReplicateSummary b = replicate_study(cfg, 8);
        CHECK(nlohmann::json(a) == nlohmann::json(b));
    }
    SUBCASE("means track the closed-form targets") {
        const int reps = 50;
        const ReplicateSummary summary = replicate_study(cfg, reps);
        const double se_a1 = summary.a1.sd / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(summary.a1.mean) < 3.5 * se_a1 + 1e-9);
        const double se_b0 = summary.b0.sd / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(summary.b0.mean - 0.7) < 3.5 * se_b0 + 1e-9);
        CHECK(summary.composition_delta.mean < 1e-10);
    }
    SUBCASE("reps must be positive") {
        CHECK_THROWS_AS(replicate_study(cfg, 0), ConfigError);
    }
}

TEST_CASE("scenario config and truth serialize") {
    ScenarioConfig cfg;
    cfg.noise.family = NoiseFamily::mixture;
    const nlohmann::json jc = cfg;
    for (const char* key :
         {"n0", "n1", "mu0", "mu1", "sigma", "rho", "gain0", "gain1", "noise", "seed"}) {
        CHECK(jc.contains(key));
    }
    CHECK(jc["noise"]["family"] == "mixture");
    const nlohmann::json jt = scenario_truth(cfg);
    CHECK(jt.contains("true_a1"));
    CHECK(jt.contains("true_ancova_group_coef"));
    CHECK(jt.contains("rng_algorithm"));
}
