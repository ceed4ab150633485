#include "paradoxlens/dataset.hpp"
#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/diagnostics.hpp"
#include "paradoxlens/errors.hpp"
#include "paradoxlens/json_io.hpp"
#include "paradoxlens/ols.hpp"
#include "paradoxlens/report.hpp"
#include "paradoxlens/simulate.hpp"
#include "paradoxlens/supermodel.hpp"
#include "paradoxlens/svg.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace paradoxlens;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Variable variable_from_name(const std::string& name) {
    if (name == "w_initial") return Variable::w_initial;
    if (name == "w_final") return Variable::w_final;
    if (name == "gain") return Variable::gain;
    throw ConfigError("unknown variable '" + name + "' (w_initial, w_final, gain)");
}

Term term_from_name(const std::string& name) {
    if (name == "intercept") return Term::intercept;
    if (name == "group") return Term::group_indicator;
    if (name == "group0") return Term::group0_indicator;
    if (name == "group1") return Term::group1_indicator;
    if (name == "w_initial") return Term::w_initial;
    throw ConfigError("unknown term '" + name +
                      "' (intercept, group, group0, group1, w_initial)");
}

CsvSchema schema_from_names(const std::string& id, const std::string& group,
                            const std::string& initial, const std::string& final_col) {
    CsvSchema schema;
    schema.id = id;
    schema.group = group;
    schema.initial = initial;
    schema.final = final_col;
    return schema;
}

ScenarioConfig config_from_kwargs(int n0, int n1, double mu0, double mu1, double sigma,
                                  double rho, double gain0, double gain1,
                                  const std::string& noise, double separation, double weight,
                                  std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.n0 = n0;
    cfg.n1 = n1;
    cfg.mu0 = mu0;
    cfg.mu1 = mu1;
    cfg.sigma = sigma;
    cfg.rho = rho;
    cfg.gain0 = gain0;
    cfg.gain1 = gain1;
    cfg.seed = seed;
    if (noise == "gaussian") cfg.noise.family = NoiseFamily::gaussian;
    else if (noise == "laplace") cfg.noise.family = NoiseFamily::laplace;
    else if (noise == "mixture") cfg.noise.family = NoiseFamily::mixture;
    else throw ConfigError("unknown noise family '" + noise + "'");
    cfg.noise.separation = separation;
    cfg.noise.weight = weight;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_paradoxlens, m) {
    m.doc() = "regression-based decomposition and diagnostics for Lord's paradox";

    py::register_exception<Error>(m, "ParadoxlensError");

    py::class_<Observation>(m, "Observation")
        .def(py::init([](std::string id, int group, double w_initial, double w_final) {
                 Observation obs;
                 obs.subject_id = std::move(id);
                 obs.group = group;
                 obs.w_initial = w_initial;
                 obs.w_final = w_final;
                 obs.gain = w_final - w_initial;
                 return obs;
             }),
             py::arg("subject_id"), py::arg("group"), py::arg("w_initial"), py::arg("w_final"))
        .def_readonly("subject_id", &Observation::subject_id)
        .def_readonly("group", &Observation::group)
        .def_readonly("w_initial", &Observation::w_initial)
        .def_readonly("w_final", &Observation::w_final)
        .def_readonly("gain", &Observation::gain)
        .def("__repr__", [](const Observation& o) {
            return "Observation(" + o.subject_id + ", group=" + std::to_string(o.group) + ")";
        });

    py::class_<Dataset>(m, "Dataset")
        .def_static("from_observations", &Dataset::from_observations, py::arg("observations"))
        .def_static(
            "from_arrays",
            [](const std::vector<std::string>& ids, const std::vector<int>& groups,
               const std::vector<double>& w_initial, const std::vector<double>& w_final) {
                if (ids.size() != groups.size() || ids.size() != w_initial.size() ||
                    ids.size() != w_final.size()) {
                    throw ConfigError("from_arrays: column lengths differ");
                }
                std::vector<Observation> rows(ids.size());
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    rows[i].subject_id = ids[i];
                    rows[i].group = groups[i];
                    rows[i].w_initial = w_initial[i];
                    rows[i].w_final = w_final[i];
                }
                return Dataset::from_observations(std::move(rows));
            },
            py::arg("ids"), py::arg("groups"), py::arg("w_initial"), py::arg("w_final"))
        .def_static(
            "from_csv",
            [](const std::string& path, const std::string& id, const std::string& group,
               const std::string& initial, const std::string& final_col) {
                return load_csv(path, schema_from_names(id, group, initial, final_col));
            },
            py::arg("path"), py::arg("id_col") = "id", py::arg("group_col") = "sex",
            py::arg("initial_col") = "w_initial", py::arg("final_col") = "w_final")
        .def(
            "to_csv",
            [](const Dataset& ds, const std::string& path) { save_csv(ds, path); },
            py::arg("path"))
        .def("__len__", &Dataset::size)
        .def("group_count", &Dataset::group_count, py::arg("group"))
        .def_property_readonly("fingerprint", &Dataset::fingerprint)
        .def("observations", &Dataset::observations)
        .def(
            "column",
            [](const Dataset& ds, const std::string& name) {
                return ds.values(variable_from_name(name));
            },
            py::arg("name"))
        .def("group_indicator", &Dataset::group_indicator)
        .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; })
        .def("__repr__", [](const Dataset& ds) {
            return "Dataset(n=" + std::to_string(ds.size()) + ", group0=" +
                   std::to_string(ds.group_count(0)) + ", group1=" +
                   std::to_string(ds.group_count(1)) + ")";
        });

    py::class_<BinningSpec>(m, "BinningSpec")
        .def_static("fixed_width", &BinningSpec::fixed_width, py::arg("k"))
        .def_static("quantile", &BinningSpec::quantile, py::arg("k"))
        .def_static("explicit_edges", &BinningSpec::explicit_edges, py::arg("edges"));
    m.def("default_binning", &default_binning, py::arg("dataset"));

    m.def(
        "assign_bins",
        [](const Dataset& ds, const BinningSpec& spec) {
            const auto assignment = assign_bins(ds, spec);
            return py::make_tuple(assignment.bin_of, assignment.edges);
        },
        py::arg("dataset"), py::arg("spec"), "returns (bin_of, edges)");

    m.def(
        "support_overlap",
        [](const Dataset& ds) { return json_to_py(nlohmann::json(support_overlap(ds))); },
        py::arg("dataset"));

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("terms", &FitResult::terms)
        .def_readonly("coefficients", &FitResult::coefficients)
        .def_readonly("standard_errors", &FitResult::standard_errors)
        .def_readonly("t_statistics", &FitResult::t_statistics)
        .def_readonly("residuals", &FitResult::residuals)
        .def_readonly("residual_variance", &FitResult::residual_variance)
        .def_readonly("r_squared", &FitResult::r_squared)
        .def_readonly("n", &FitResult::n)
        .def("coefficient", &FitResult::coefficient, py::arg("term"))
        .def("standard_error", &FitResult::standard_error, py::arg("term"))
        .def("t_statistic", &FitResult::t_statistic, py::arg("term"))
        .def("sse", &FitResult::sse)
        .def("to_dict", [](const FitResult& r) { return json_to_py(nlohmann::json(r)); })
        .def("__repr__", [](const FitResult& r) {
            return "FitResult(response=" + r.response + ", p=" + std::to_string(r.terms.size()) +
                   ", n=" + std::to_string(r.n) + ")";
        });

    m.def(
        "fit",
        [](const Dataset& ds, const std::string& response, const std::vector<std::string>& terms) {
            DesignSpec spec;
            spec.response = variable_from_name(response);
            for (const auto& t : terms) spec.terms.push_back(term_from_name(t));
            return fit(ds, spec);
        },
        py::arg("dataset"), py::arg("response"), py::arg("terms"));
    m.def("predict", &predict, py::arg("fit"), py::arg("dataset"));
    m.def(
        "reverse_fit",
        [](const Dataset& ds, const std::string& x, const std::string& y) {
            const auto report = reverse_fit(ds, variable_from_name(x), variable_from_name(y));
            py::dict out;
            out["forward"] = json_to_py(nlohmann::json(report.forward));
            out["reverse"] = json_to_py(nlohmann::json(report.reverse));
            out["slope_product"] = report.slope_product;
            out["r_squared"] = report.r_squared;
            return out;
        },
        py::arg("dataset"), py::arg("x"), py::arg("y"));

    m.def("compute_a1", &compute_a1, py::arg("dataset"));
    m.def(
        "compute_a2",
        [](const Dataset& ds, const BinningSpec& spec) {
            return json_to_py(nlohmann::json(compute_a2(ds, spec)));
        },
        py::arg("dataset"), py::arg("spec"));
    m.def(
        "conditional_effect_curve",
        [](const Dataset& ds, const BinningSpec& spec) {
            return json_to_py(nlohmann::json(conditional_effect_curve(ds, spec)));
        },
        py::arg("dataset"), py::arg("spec"));

    py::class_<ResidualStageFit>(m, "ResidualStageFit")
        .def_readonly("a0", &ResidualStageFit::a0)
        .def_readonly("a1", &ResidualStageFit::a1)
        .def_readonly("b0", &ResidualStageFit::b0)
        .def_readonly("stage_residuals", &ResidualStageFit::stage_residuals)
        .def_readonly("slope_gap", &ResidualStageFit::slope_gap)
        .def("to_dict", [](const ResidualStageFit& s) { return json_to_py(nlohmann::json(s)); });

    m.def("fit_submodel", &fit_submodel, py::arg("dataset"));
    m.def("fit_residual_stage", &fit_residual_stage, py::arg("dataset"), py::arg("submodel"));
    m.def(
        "compose",
        [](const Dataset& ds, const FitResult& submodel, const ResidualStageFit& stage) {
            return json_to_py(nlohmann::json(compose(ds, submodel, stage)));
        },
        py::arg("dataset"), py::arg("submodel"), py::arg("stage"));
    m.def(
        "run_supermodel",
        [](const Dataset& ds) { return json_to_py(nlohmann::json(run_supermodel(ds))); },
        py::arg("dataset"));

    m.def("dip_statistic", &dip_statistic, py::arg("values"));
    m.def(
        "symmetry_test",
        [](const std::vector<double>& values, std::uint64_t seed, int bootstrap) {
            const auto result = symmetry_test(values, seed, bootstrap);
            return py::make_tuple(result.skewness, result.p_value);
        },
        py::arg("values"), py::arg("seed") = 0, py::arg("bootstrap_samples") = 2000,
        "returns (skewness, p_value)");
    m.def(
        "unimodality_test",
        [](const std::vector<double>& values, std::uint64_t seed, int null_samples) {
            const auto result = unimodality_test(values, seed, null_samples);
            return py::make_tuple(result.dip, result.p_value);
        },
        py::arg("values"), py::arg("seed") = 0, py::arg("null_samples") = 2000,
        "returns (dip, p_value)");
    m.def(
        "residual_diagnostics",
        [](const Dataset& ds, const FitResult& fitted, const BinningSpec& spec,
           std::uint64_t seed, double alpha, int min_n) {
            DiagnosticsConfig config;
            config.seed = seed;
            config.alpha = alpha;
            config.min_stratum_n = min_n;
            return json_to_py(nlohmann::json(residual_diagnostics(ds, fitted, spec, config)));
        },
        py::arg("dataset"), py::arg("fit"), py::arg("spec"), py::arg("seed") = 0,
        py::arg("alpha") = 0.05, py::arg("min_n") = 20);
    m.def(
        "variance_reduction_check",
        [](const Dataset& ds, const FitResult& submodel, const BinningSpec& spec) {
            return json_to_py(nlohmann::json(variance_reduction_check(ds, submodel, spec)));
        },
        py::arg("dataset"), py::arg("submodel"), py::arg("spec"));

    m.def(
        "generate",
        [](int n0, int n1, double mu0, double mu1, double sigma, double rho, double gain0,
           double gain1, const std::string& noise, double separation, double weight,
           std::uint64_t seed) {
            const auto cfg = config_from_kwargs(n0, n1, mu0, mu1, sigma, rho, gain0, gain1,
                                                noise, separation, weight, seed);
            auto [ds, truth] = generate(cfg);
            return py::make_tuple(std::move(ds), json_to_py(nlohmann::json(truth)));
        },
        py::arg("n0") = 2000, py::arg("n1") = 2000, py::arg("mu0") = 54.0, py::arg("mu1") = 64.0,
        py::arg("sigma") = 5.0, py::arg("rho") = 0.7, py::arg("gain0") = 0.0,
        py::arg("gain1") = 0.0, py::arg("noise") = "gaussian", py::arg("separation") = 6.0,
        py::arg("weight") = 0.5, py::arg("seed") = 0, "returns (Dataset, truth dict)");
    m.def(
        "replicate_study",
        [](int reps, int n0, int n1, double mu0, double mu1, double sigma, double rho,
           double gain0, double gain1, const std::string& noise, double separation,
           double weight, std::uint64_t seed) {
            const auto cfg = config_from_kwargs(n0, n1, mu0, mu1, sigma, rho, gain0, gain1,
                                                noise, separation, weight, seed);
            return json_to_py(nlohmann::json(replicate_study(cfg, reps)));
        },
        py::arg("reps"), py::arg("n0") = 2000, py::arg("n1") = 2000, py::arg("mu0") = 54.0,
        py::arg("mu1") = 64.0, py::arg("sigma") = 5.0, py::arg("rho") = 0.7,
        py::arg("gain0") = 0.0, py::arg("gain1") = 0.0, py::arg("noise") = "gaussian",
        py::arg("separation") = 6.0, py::arg("weight") = 0.5, py::arg("seed") = 0);

    m.def(
        "analyze",
        [](const Dataset& ds, std::optional<BinningSpec> binning, std::uint64_t seed,
           double alpha, int min_n) {
            AnalysisOptions options;
            options.binning = std::move(binning);
            options.diagnostics.seed = seed;
            options.diagnostics.alpha = alpha;
            options.diagnostics.min_stratum_n = min_n;
            return json_to_py(bundle_to_json(analyze(ds, options)));
        },
        py::arg("dataset"), py::arg("binning") = std::nullopt, py::arg("seed") = 0,
        py::arg("alpha") = 0.05, py::arg("min_n") = 20);

    m.def(
        "render_scatter_svg",
        [](const Dataset& ds) { return render_scatter_svg(ds); },
        py::arg("dataset"));
}
