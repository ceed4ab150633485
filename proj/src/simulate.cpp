#include "paradoxlens/simulate.hpp"

#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/errors.hpp"
#include "paradoxlens/rng.hpp"
#include "paradoxlens/supermodel.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace paradoxlens {

std::string noise_family_name(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::laplace: return "laplace";
        case NoiseFamily::mixture: return "mixture";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    if (n0 < 2) throw ConfigError("scenario: n0 must be >= 2");
    if (n1 < 2) throw ConfigError("scenario: n1 must be >= 2");
    if (!(sigma > 0.0)) throw ConfigError("scenario: sigma must be > 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw ConfigError("scenario: rho must lie in [-1, 1]");
    if (!std::isfinite(mu0) || !std::isfinite(mu1)) {
        throw ConfigError("scenario: mu0/mu1 must be finite");
    }
    if (!std::isfinite(gain0) || !std::isfinite(gain1)) {
        throw ConfigError("scenario: gain0/gain1 must be finite");
    }
    if (noise.family == NoiseFamily::mixture) {
        if (!(noise.separation >= 0.0)) throw ConfigError("scenario: mixture separation must be >= 0");
        if (!(noise.weight > 0.0 && noise.weight < 1.0)) {
            throw ConfigError("scenario: mixture weight must lie in (0, 1)");
        }
    }
}

ScenarioTruth scenario_truth(const ScenarioConfig& cfg) {
    ScenarioTruth truth;
    truth.true_a1 = cfg.gain1 - cfg.gain0;
    truth.true_ancova_group_coef = (cfg.mu1 - cfg.mu0) * (1.0 - cfg.rho) + (cfg.gain1 - cfg.gain0);
    truth.true_b0 = cfg.rho;
    truth.true_residual_variance_submodel = cfg.sigma * cfg.sigma;
    truth.true_residual_variance_supermodel = cfg.sigma * cfg.sigma * (1.0 - cfg.rho * cfg.rho);
    truth.rng_algorithm = Rng::algorithm;
    return truth;
}

namespace {

// Draws one noise value with mean 0 and the requested standard deviation.
double draw_noise(Rng& rng, const NoiseSpec& noise, double sd) {
    switch (noise.family) {
        case NoiseFamily::gaussian:
            return sd * rng.normal();
        case NoiseFamily::laplace:
            return rng.laplace(sd / std::sqrt(2.0));
        case NoiseFamily::mixture: {
            const double w = noise.weight;
            const double gap = noise.separation;
            // component sd tau solves tau^2 (1 + w(1-w) gap^2) = sd^2
            const double tau = sd / std::sqrt(1.0 + w * (1.0 - w) * gap * gap);
            const double delta = gap * tau;
            const double m_low = -(1.0 - w) * delta;
            const double m_high = w * delta;
            const double center = rng.coin(w) ? m_low : m_high;
            return center + tau * rng.normal();
        }
    }
    return 0.0;
}

} // namespace

std::pair<Dataset, ScenarioTruth> generate(const ScenarioConfig& cfg) {
    cfg.validate();
    Rng rng(substream_seed(cfg.seed, 0));
    const double noise_sd = cfg.sigma * std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));

    std::vector<Observation> rows;
    rows.reserve(static_cast<std::size_t>(cfg.n0 + cfg.n1));
    int counter = 0;
    for (int group : {0, 1}) {
        const int n = group == 0 ? cfg.n0 : cfg.n1;
        const double mu = group == 0 ? cfg.mu0 : cfg.mu1;
        const double gain = group == 0 ? cfg.gain0 : cfg.gain1;
        for (int i = 0; i < n; ++i) {
            Observation obs;
            char id[16];
            std::snprintf(id, sizeof(id), "s%06d", counter++);
            obs.subject_id = id;
            obs.group = group;
            obs.w_initial = mu + cfg.sigma * rng.normal();
            const double e = noise_sd > 0.0 ? draw_noise(rng, cfg.noise, noise_sd) : 0.0;
            obs.w_final = mu + cfg.rho * (obs.w_initial - mu) + gain + e;
            rows.push_back(std::move(obs));
        }
    }
    return {Dataset::from_observations(std::move(rows)), scenario_truth(cfg)};
}

namespace {

ReplicateStat summarize(const std::vector<double>& values) {
    ReplicateStat stat;
    const auto n = static_cast<double>(values.size());
    for (double v : values) stat.mean += v;
    stat.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - stat.mean) * (v - stat.mean);
        stat.sd = std::sqrt(ss / (n - 1.0));
    }
    return stat;
}

} // namespace

ReplicateSummary replicate_study(const ScenarioConfig& cfg, int reps) {
    cfg.validate();
    if (reps < 1) throw ConfigError("replicate_study: reps must be >= 1");

    std::vector<double> a1s, a2s, ancovas, b0s, deltas;
    a1s.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        ScenarioConfig rep_cfg = cfg;
        rep_cfg.seed = substream_seed(cfg.seed, static_cast<std::uint64_t>(r) + 1);
        const auto [ds, truth] = generate(rep_cfg);

        a1s.push_back(compute_a1(ds));
        a2s.push_back(compute_a2(ds, default_binning(ds)).a2);
        const SupermodelReport report = run_supermodel(ds);
        ancovas.push_back(report.direct.coefficient("group"));
        b0s.push_back(report.stage.b0);
        deltas.push_back(report.max_composition_delta);
    }

    ReplicateSummary summary;
    summary.replicates = reps;
    summary.a1 = summarize(a1s);
    summary.a2 = summarize(a2s);
    summary.ancova_group_coef = summarize(ancovas);
    summary.b0 = summarize(b0s);
    summary.composition_delta = summarize(deltas);
    return summary;
}

} // namespace paradoxlens
