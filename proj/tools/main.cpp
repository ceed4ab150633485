#include "paradoxlens/dataset.hpp"
#include "paradoxlens/decomposition.hpp"
#include "paradoxlens/diagnostics.hpp"
#include "paradoxlens/errors.hpp"
#include "paradoxlens/json_io.hpp"
#include "paradoxlens/report.hpp"
#include "paradoxlens/simulate.hpp"
#include "paradoxlens/svg.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace paradoxlens;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoOverlap = 3;
constexpr int kExitDiagnostics = 4;

struct CommonFlags {
    std::string output;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
    std::optional<int> bins;
    std::string bin_strategy;
    CsvSchema schema;
    int min_n = 20;
    double alpha = 0.05;
};

void add_column_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--col-id", flags.schema.id, "subject-id column name");
    cmd->add_option("--col-group", flags.schema.group, "group column name");
    cmd->add_option("--col-initial", flags.schema.initial, "initial-measure column name");
    cmd->add_option("--col-final", flags.schema.final, "final-measure column name");
}

std::uint64_t resolve_seed(const CommonFlags& flags) {
    if (flags.seed.has_value()) return *flags.seed;
    if (const char* env = std::getenv("PARADOXLENS_SEED")) {
        std::uint64_t value = 0;
        const char* end = env + std::string_view(env).size();
        auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc() || ptr != end) {
            throw ConfigError("PARADOXLENS_SEED must be an unsigned integer, got '" +
                              std::string(env) + "'");
        }
        return value;
    }
    return 0;
}

// --bin-strategy {width,quantile,edges:<comma list>} plus --bins <k>
std::optional<BinningSpec> resolve_binning(const CommonFlags& flags, const Dataset& ds) {
    if (flags.bin_strategy.empty() && !flags.bins.has_value()) return std::nullopt;

    std::string strategy = flags.bin_strategy.empty() ? "quantile" : flags.bin_strategy;
    if (strategy.rfind("edges:", 0) == 0) {
        std::vector<double> edges;
        std::string list = strategy.substr(6);
        std::size_t pos = 0;
        while (pos <= list.size()) {
            const std::size_t comma = list.find(',', pos);
            const std::string tok = list.substr(pos, comma == std::string::npos ? comma : comma - pos);
            try {
                edges.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigError("bad edge value '" + tok + "' in --bin-strategy");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return BinningSpec::explicit_edges(std::move(edges));
    }
    const int k = flags.bins.value_or(default_binning(ds).bin_count);
    if (strategy == "width") return BinningSpec::fixed_width(k);
    if (strategy == "quantile") return BinningSpec::quantile(k);
    throw ConfigError("unknown --bin-strategy '" + strategy + "' (width, quantile, edges:<list>)");
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void emit(const CommonFlags& flags, const std::string& content) {
    if (flags.output.empty()) std::cout << content;
    else write_text_file(flags.output, content);
}

struct SimulateFlags {
    CommonFlags common;
    std::string preset;
    ScenarioConfig cfg;
    std::string noise = "gaussian";
    bool n0_set = false, n1_set = false, mu0_set = false, mu1_set = false;
    bool sigma_set = false, rho_set = false, gain0_set = false, gain1_set = false;
};

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg;   // defaults are the lord-null constants
    if (name.empty() || name == "lord-null") return cfg;
    if (name == "gain") {
        cfg.mu0 = 58.0;
        cfg.mu1 = 58.0;
        cfg.gain1 = 2.0;
        return cfg;
    }
    if (name == "confounded") {
        cfg.gain1 = 2.0;
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "' (lord-null, gain, confounded)");
}

NoiseSpec parse_noise(const std::string& text) {
    NoiseSpec noise;
    if (text == "gaussian") return noise;
    if (text == "laplace") {
        noise.family = NoiseFamily::laplace;
        return noise;
    }
    if (text.rfind("mixture", 0) == 0) {
        noise.family = NoiseFamily::mixture;
        if (text.size() > 7 && text[7] == ':') {
            const std::string params = text.substr(8);
            const std::size_t comma = params.find(',');
            try {
                noise.separation = std::stod(params.substr(0, comma));
                if (comma != std::string::npos) noise.weight = std::stod(params.substr(comma + 1));
            } catch (const std::exception&) {
                throw ConfigError("bad mixture parameters '" + params +
                                  "' (expected mixture:<separation>[,<weight>])");
            }
        }
        return noise;
    }
    throw ConfigError("unknown noise family '" + text +
                      "' (gaussian, laplace, mixture[:sep,weight])");
}

int cmd_simulate(SimulateFlags& flags) {
    if (flags.common.output.empty()) {
        throw ConfigError("simulate needs -o/--output for the CSV path");
    }
    ScenarioConfig cfg = preset_config(flags.preset);
    if (flags.n0_set) cfg.n0 = flags.cfg.n0;
    if (flags.n1_set) cfg.n1 = flags.cfg.n1;
    if (flags.mu0_set) cfg.mu0 = flags.cfg.mu0;
    if (flags.mu1_set) cfg.mu1 = flags.cfg.mu1;
    if (flags.sigma_set) cfg.sigma = flags.cfg.sigma;
    if (flags.rho_set) cfg.rho = flags.cfg.rho;
    if (flags.gain0_set) cfg.gain0 = flags.cfg.gain0;
    if (flags.gain1_set) cfg.gain1 = flags.cfg.gain1;
    cfg.noise = parse_noise(flags.noise);
    cfg.seed = resolve_seed(flags.common);
    cfg.validate();

    const auto [ds, truth] = generate(cfg);
    const std::filesystem::path csv_path = flags.common.output;
    save_csv(ds, csv_path, flags.common.schema);

    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".scenario.json");
    nlohmann::json meta{{"config", cfg}, {"truth", truth}};
    write_text_file(sidecar, meta.dump(2) + "\n");

    std::cerr << "wrote " << csv_path.string() << " (" << ds.size() << " rows) and "
              << sidecar.string() << "\n";
    return kExitOk;
}

int cmd_analyze(CommonFlags& flags, const std::string& input) {
    const Dataset ds = load_csv(input, flags.schema);
    AnalysisOptions options;
    options.binning = resolve_binning(flags, ds);
    options.diagnostics.seed = resolve_seed(flags);
    options.diagnostics.alpha = flags.alpha;
    options.diagnostics.min_stratum_n = flags.min_n;

    const ReportBundle bundle = analyze(ds, options);
    if (flags.format == "json") {
        emit(flags, bundle_to_json(bundle).dump(2) + "\n");
    } else if (flags.format == "text") {
        emit(flags, bundle.narrative);
    } else {
        throw ConfigError("unknown --format '" + flags.format + "' (json, text)");
    }
    return kExitOk;
}

int cmd_plot(CommonFlags& flags, const std::string& input) {
    if (flags.output.empty()) {
        throw ConfigError("plot needs -o/--output for the SVG path");
    }
    const Dataset ds = load_csv(input, flags.schema);
    write_text_file(flags.output, render_scatter_svg(ds));
    return kExitOk;
}

std::string render_diagnostics_table(const DiagnosticsReport& report) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %6s %10s %10s %10s %10s  %s\n", "stratum", "n",
                  "skewness", "sym_p", "dip", "dip_p", "verdict");
    out += line;
    for (const auto& s : report.strata) {
        if (s.verdict == Verdict::insufficient_n) {
            std::snprintf(line, sizeof(line), "%-16s %6d %10s %10s %10s %10s  %s\n",
                          s.label.c_str(), s.n, "-", "-", "-", "-",
                          verdict_name(s.verdict).c_str());
        } else {
            std::snprintf(line, sizeof(line), "%-16s %6d %10.4f %10.4f %10.4f %10.4f  %s\n",
                          s.label.c_str(), s.n, s.skewness, s.symmetry_p, s.dip, s.dip_p,
                          verdict_name(s.verdict).c_str());
        }
        out += line;
    }
    out += "overall: " + verdict_name(report.overall) + "\n";
    return out;
}

int cmd_diagnose(CommonFlags& flags, const std::string& input, const std::string& model) {
    const Dataset ds = load_csv(input, flags.schema);

    DesignSpec spec;
    spec.response = Variable::w_final;
    if (model == "submodel") {
        spec.terms = {Term::intercept, Term::group_indicator};
    } else if (model == "ancova") {
        spec.terms = {Term::intercept, Term::group_indicator, Term::w_initial};
    } else {
        throw ConfigError("unknown --model '" + model + "' (submodel, ancova)");
    }
    const FitResult fitted = fit(ds, spec);

    const BinningSpec binning = resolve_binning(flags, ds).value_or(default_binning(ds));
    DiagnosticsConfig config;
    config.seed = resolve_seed(flags);
    config.alpha = flags.alpha;
    config.min_stratum_n = flags.min_n;
    const DiagnosticsReport report = residual_diagnostics(ds, fitted, binning, config);

    if (flags.format == "json") {
        emit(flags, nlohmann::json(report).dump(2) + "\n");
    } else if (flags.format == "text") {
        emit(flags, render_diagnostics_table(report));
    } else {
        throw ConfigError("unknown --format '" + flags.format + "' (json, text)");
    }
    if (report.overall == Verdict::insufficient_n) {
        std::cerr << "warning: every stratum is below the minimum n; no verdict issued\n";
    }
    return report.overall == Verdict::violates ? kExitDiagnostics : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regression-based analysis of Lord's paradox: decomposition, "
                 "model upgrade, diagnostics and simulation"};
    app.require_subcommand(1);

    SimulateFlags sim;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "generate a synthetic two-group scenario CSV");
    simulate_cmd->add_option("--preset", sim.preset, "lord-null | gain | confounded");
    simulate_cmd->add_option("-o,--output", sim.common.output, "output CSV path");
    simulate_cmd->add_option("--seed", sim.common.seed, "RNG seed (fallback: PARADOXLENS_SEED)");
    simulate_cmd->add_option("--n0", sim.cfg.n0, "group-0 size")
        ->check(CLI::PositiveNumber)
        ->each([&sim](const std::string&) { sim.n0_set = true; });
    simulate_cmd->add_option("--n1", sim.cfg.n1, "group-1 size")
        ->check(CLI::PositiveNumber)
        ->each([&sim](const std::string&) { sim.n1_set = true; });
    simulate_cmd->add_option("--mu0", sim.cfg.mu0, "group-0 initial mean")
        ->each([&sim](const std::string&) { sim.mu0_set = true; });
    simulate_cmd->add_option("--mu1", sim.cfg.mu1, "group-1 initial mean")
        ->each([&sim](const std::string&) { sim.mu1_set = true; });
    simulate_cmd->add_option("--sigma", sim.cfg.sigma, "within-group sd of the initial measure")
        ->check(CLI::PositiveNumber)
        ->each([&sim](const std::string&) { sim.sigma_set = true; });
    simulate_cmd->add_option("--rho", sim.cfg.rho, "regression-to-the-mean coefficient")
        ->check(CLI::Range(-1.0, 1.0).description("rho must lie in [-1, 1]"))
        ->each([&sim](const std::string&) { sim.rho_set = true; });
    simulate_cmd->add_option("--gain0", sim.cfg.gain0, "true additive gain, group 0")
        ->each([&sim](const std::string&) { sim.gain0_set = true; });
    simulate_cmd->add_option("--gain1", sim.cfg.gain1, "true additive gain, group 1")
        ->each([&sim](const std::string&) { sim.gain1_set = true; });
    simulate_cmd->add_option("--noise", sim.noise, "gaussian | laplace | mixture[:sep,weight]");
    add_column_flags(simulate_cmd, sim.common);
    (void)track;

    CommonFlags analyze_flags;
    std::string analyze_input;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "decomposition, model upgrade, diagnostics, overlap");
    analyze_cmd->add_option("input", analyze_input, "input CSV")->required();
    analyze_cmd->add_option("-o,--output", analyze_flags.output, "output path (default stdout)");
    analyze_cmd->add_option("--format", analyze_flags.format, "json | text");
    analyze_cmd->add_option("--seed", analyze_flags.seed, "diagnostics RNG seed");
    analyze_cmd->add_option("--bins", analyze_flags.bins, "bin count");
    analyze_cmd->add_option("--bin-strategy", analyze_flags.bin_strategy,
                            "width | quantile | edges:<comma list>");
    analyze_cmd->add_option("--min-n", analyze_flags.min_n, "minimum stratum n for a verdict");
    analyze_cmd->add_option("--alpha", analyze_flags.alpha, "diagnostic p-value threshold")
        ->check(CLI::Range(0.0, 1.0));
    add_column_flags(analyze_cmd, analyze_flags);

    CommonFlags plot_flags;
    std::string plot_input;
    CLI::App* plot_cmd = app.add_subcommand("plot", "per-group scatter with fits as SVG");
    plot_cmd->add_option("input", plot_input, "input CSV")->required();
    plot_cmd->add_option("-o,--output", plot_flags.output, "output SVG path")->required();
    add_column_flags(plot_cmd, plot_flags);

    CommonFlags diag_flags;
    std::string diag_input;
    std::string diag_model = "submodel";
    CLI::App* diagnose_cmd =
        app.add_subcommand("diagnose", "residual symmetry/unimodality per stratum");
    diagnose_cmd->add_option("input", diag_input, "input CSV")->required();
    diagnose_cmd->add_option("--model", diag_model, "submodel | ancova");
    diagnose_cmd->add_option("-o,--output", diag_flags.output, "output path (default stdout)");
    diagnose_cmd->add_option("--format", diag_flags.format, "json | text");
    diagnose_cmd->add_option("--seed", diag_flags.seed, "RNG seed");
    diagnose_cmd->add_option("--bins", diag_flags.bins, "bin count");
    diagnose_cmd->add_option("--bin-strategy", diag_flags.bin_strategy,
                             "width | quantile | edges:<comma list>");
    diagnose_cmd->add_option("--min-n", diag_flags.min_n, "minimum stratum n for a verdict");
    diagnose_cmd->add_option("--alpha", diag_flags.alpha, "diagnostic p-value threshold")
        ->check(CLI::Range(0.0, 1.0));
    add_column_flags(diagnose_cmd, diag_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(sim);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_flags, analyze_input);
        if (plot_cmd->parsed()) return cmd_plot(plot_flags, plot_input);
        if (diagnose_cmd->parsed()) return cmd_diagnose(diag_flags, diag_input, diag_model);
    } catch (const NoOverlapError& e) {
        std::cerr << "error: " << e.what()
                  << "\nthe groups share no covariate bin; conclusions would rest on "
                     "extrapolation\n";
        return kExitNoOverlap;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
