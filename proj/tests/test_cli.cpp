#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subprocess.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

using subprocess::TempDir;
using subprocess::cli_path;
using subprocess::run;
using subprocess::slurp;

namespace {

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// two groups with disjoint covariate ranges
const char* kDisjointCsv =
    "id,sex,w_initial,w_final\n"
    "a1,0,10,11\n"
    "a2,0,11,12\n"
    "a3,0,12,13\n"
    "b1,1,90,92\n"
    "b2,1,91,93\n"
    "b3,1,92,94\n";

} // namespace

TEST_CASE("simulate writes a deterministic CSV plus sidecar") {
    TempDir dir;
    const auto csv = dir.path() / "data.csv";
    const auto cmd = cli_path() + " simulate --preset lord-null --seed 7 -o " + q(csv);
    const auto first = run(cmd);
    REQUIRE(first.exit_code == 0);
    const std::string bytes = slurp(csv);
    CHECK(bytes.rfind("id,sex,w_initial,w_final\n", 0) == 0);
    // 4000 data rows + header
    std::size_t lines = 0;
    for (char c : bytes) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 4001);

    const auto sidecar = dir.path() / "data.scenario.json";
    REQUIRE(std::filesystem::exists(sidecar));
    const auto meta = nlohmann::json::parse(slurp(sidecar));
    CHECK(meta["config"]["mu0"] == 54.0);
    CHECK(meta["config"]["seed"] == 7);
    CHECK(meta["truth"]["true_ancova_group_coef"] == doctest::Approx(3.0));
    CHECK(meta["truth"].contains("rng_algorithm"));

    SUBCASE("byte-identical on a second run") {
        const auto again = dir.path() / "again.csv";
        REQUIRE(run(cli_path() + " simulate --preset lord-null --seed 7 -o " + q(again))
                    .exit_code == 0);
        CHECK(slurp(again) == bytes);
    }
    SUBCASE("different seed, different bytes") {
        const auto other = dir.path() / "other.csv";
        REQUIRE(run(cli_path() + " simulate --preset lord-null --seed 8 -o " + q(other))
                    .exit_code == 0);
        CHECK(slurp(other) != bytes);
    }
    SUBCASE("PARADOXLENS_SEED is the fallback seed") {
        const auto via_env = dir.path() / "env.csv";
        const auto result =
            run("PARADOXLENS_SEED=7 " + cli_path() + " simulate --preset lord-null -o " +
                q(via_env));
        REQUIRE(result.exit_code == 0);
        CHECK(slurp(via_env) == bytes);
    }
}

TEST_CASE("simulate flag validation") {
    TempDir dir;
    SUBCASE("rho out of range is a usage error naming the bounds") {
        const auto result = run(cli_path() + " simulate --rho 1.5 -o " +
                                q(dir.path() / "x.csv"));
        CHECK(result.exit_code == 2);
        CHECK(result.output.find("rho") != std::string::npos);
        CHECK(result.output.find("-1") != std::string::npos);
        CHECK(result.output.find("1") != std::string::npos);
    }
    SUBCASE("missing output is a usage error") {
        CHECK(run(cli_path() + " simulate --preset lord-null").exit_code == 2);
    }
    SUBCASE("unknown preset is a usage error") {
        CHECK(run(cli_path() + " simulate --preset nope -o " + q(dir.path() / "x.csv"))
                  .exit_code == 2);
    }
    SUBCASE("unwritable path is an io error") {
        CHECK(run(cli_path() + " simulate -o /nonexistent_dir_zzz/x.csv").exit_code == 1);
    }
}

TEST_CASE("analyze produces matching text and json") {
    TempDir dir;
    const auto csv = dir.path() / "data.csv";
    REQUIRE(run(cli_path() + " simulate --preset lord-null --seed 7 -o " + q(csv)).exit_code ==
            0);

    const auto json_path = dir.path() / "report.json";
    const auto json_run = run(cli_path() + " analyze " + q(csv) + " --seed 5 --format json -o " +
                              q(json_path));
    REQUIRE(json_run.exit_code == 0);
    const auto report = nlohmann::json::parse(slurp(json_path));
    for (const char* key : {"overlap", "decomposition", "supermodel", "diagnostics", "narrative"}) {
        CHECK(report.contains(key));
    }

    // lord-null: A1 near zero, adjusted coefficient near 3 and significant
    const double a1 = report["decomposition"]["a1"].get<double>();
    CHECK(std::abs(a1) < 0.25);
    const double composed_group = report["supermodel"]["composed"]["group"].get<double>();
    CHECK(composed_group > 2.5);
    CHECK(composed_group < 3.5);
    const auto& direct = report["supermodel"]["direct"];
    // |t| of the group coefficient
    double group_t = 0.0;
    for (std::size_t i = 0; i < direct["terms"].size(); ++i) {
        if (direct["terms"][i] == "group") group_t = direct["t"][i].get<double>();
    }
    CHECK(std::abs(group_t) > 2.0);

    const auto text_run = run(cli_path() + " analyze " + q(csv) + " --seed 5");
    REQUIRE(text_run.exit_code == 0);
    // narrative numbers equal the JSON renderings
    CHECK(text_run.output.find("A1 = " + nlohmann::json(a1).dump()) != std::string::npos);
    CHECK(text_run.output.find(nlohmann::json(composed_group).dump()) != std::string::npos);

    SUBCASE("json output is byte-deterministic") {
        const auto second = dir.path() / "report2.json";
        REQUIRE(run(cli_path() + " analyze " + q(csv) + " --seed 5 --format json -o " +
                    q(second))
                    .exit_code == 0);
        CHECK(slurp(second) == slurp(json_path));
    }
}

TEST_CASE("analyze on the worked dataset with explicit edges") {
    TempDir dir;
    const auto csv = dir.path() / "worked.csv";
    write_file(csv,
               "id,sex,w_initial,w_final\n"
               "b1,1,40,43\nb2,1,60,61\nb3,1,61,62\nb4,1,62,63\n"
               "g1,0,41,43\ng2,0,42,44\ng3,0,43,45\ng4,0,63,63\n");
    const auto result = run(cli_path() + " analyze " + q(csv) +
                            " --bin-strategy edges:0,50,100 --format json");
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.output);
    CHECK(report["decomposition"]["a1"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report["decomposition"]["a2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report["decomposition"]["weight_divergence"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("analyze error paths") {
    TempDir dir;
    SUBCASE("missing input file exits 1") {
        CHECK(run(cli_path() + " analyze " + q(dir.path() / "missing.csv")).exit_code == 1);
    }
    SUBCASE("bad column mapping exits 1") {
        const auto csv = dir.path() / "d.csv";
        write_file(csv, "id,sex,w_initial,w_final\na,0,1,2\nb,1,3,4\nc,0,2,3\nd,1,4,5\n");
        CHECK(run(cli_path() + " analyze " + q(csv) + " --col-group gender").exit_code == 1);
    }
    SUBCASE("disjoint supports exit 3 with an extrapolation note") {
        const auto csv = dir.path() / "disjoint.csv";
        write_file(csv, kDisjointCsv);
        const auto result = run(cli_path() + " analyze " + q(csv) + " --bins 2");
        CHECK(result.exit_code == 3);
        CHECK(result.output.find("extrapolation") != std::string::npos);
    }
    SUBCASE("bad format flag exits 2") {
        const auto csv = dir.path() / "d.csv";
        write_file(csv, "id,sex,w_initial,w_final\na,0,1,2\nb,1,3,4\nc,0,2,3\nd,1,4,5\n");
        CHECK(run(cli_path() + " analyze " + q(csv) + " --format xml").exit_code == 2);
    }
}

TEST_CASE("fixed-width binning strategy via flags") {
    TempDir dir;
    const auto csv = dir.path() / "worked.csv";
    write_file(csv,
               "id,sex,w_initial,w_final\n"
               "b1,1,40,43\nb2,1,60,61\nb3,1,61,62\nb4,1,62,63\n"
               "g1,0,41,43\ng2,0,42,44\ng3,0,43,45\ng4,0,63,63\n");
    // width-2 bins over [40, 63] split at 51.5, same partition as the edges
    const auto result =
        run(cli_path() + " analyze " + q(csv) + " --bin-strategy width --bins 2 --format json");
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.output);
    CHECK(report["decomposition"]["a2"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("column remapping end to end") {
    TempDir dir;
    const auto csv = dir.path() / "mapped.csv";
    write_file(csv,
               "subject,arm,pre,post\n"
               "a,0,50,51\nb,0,52,53\nc,1,60,62\nd,1,61,63\n");
    const auto result = run(cli_path() + " analyze " + q(csv) +
                            " --col-id subject --col-group arm --col-initial pre "
                            "--col-final post --bins 1 --format json");
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.output);
    CHECK(report["decomposition"]["a1"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plot emits a deterministic well-formed svg") {
    TempDir dir;
    const auto csv = dir.path() / "data.csv";
    REQUIRE(run(cli_path() + " simulate --preset lord-null --seed 3 --n0 150 --n1 150 -o " +
                q(csv))
                .exit_code == 0);
    const auto svg_path = dir.path() / "plot.svg";
    REQUIRE(run(cli_path() + " plot " + q(csv) + " -o " + q(svg_path)).exit_code == 0);
    const std::string svg = slurp(svg_path);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("identity-line") != std::string::npos);
    CHECK(svg.find("group0-points") != std::string::npos);
    CHECK(svg.find("group1-points") != std::string::npos);
    CHECK(svg.find("legend") != std::string::npos);

    const auto second = dir.path() / "plot2.svg";
    REQUIRE(run(cli_path() + " plot " + q(csv) + " -o " + q(second)).exit_code == 0);
    CHECK(slurp(second) == svg);

    SUBCASE("single-group input fails before rendering") {
        const auto bad = dir.path() / "single.csv";
        write_file(bad, "id,sex,w_initial,w_final\na,0,1,2\nb,0,2,3\n");
        CHECK(run(cli_path() + " plot " + q(bad) + " -o " + q(dir.path() / "x.svg")).exit_code ==
              1);
    }
}

TEST_CASE("diagnose gates on the verdict") {
    TempDir dir;
    const auto gaussian = dir.path() / "gaussian.csv";
    REQUIRE(run(cli_path() + " simulate --preset lord-null --seed 5 --n0 800 --n1 800 -o " +
                q(gaussian))
                .exit_code == 0);
    const auto mixture = dir.path() / "mixture.csv";
    REQUIRE(run(cli_path() +
                " simulate --preset lord-null --noise mixture --seed 5 --n0 800 --n1 800 -o " +
                q(mixture))
                .exit_code == 0);

    SUBCASE("gaussian data exits 0") {
        const auto result = run(cli_path() + " diagnose " + q(gaussian) + " --seed 2");
        CHECK(result.exit_code == 0);
        CHECK(result.output.find("overall: supports_effect_reading") != std::string::npos);
    }
    SUBCASE("mixture data exits 4") {
        const auto result = run(cli_path() + " diagnose " + q(mixture) + " --seed 2");
        CHECK(result.exit_code == 4);
        CHECK(result.output.find("overall: violates") != std::string::npos);
    }
    SUBCASE("huge min-n leaves every stratum insufficient and exits 0 with a warning") {
        const auto result =
            run(cli_path() + " diagnose " + q(gaussian) + " --seed 2 --min-n 100000");
        CHECK(result.exit_code == 0);
        CHECK(result.output.find("insufficient_n") != std::string::npos);
        CHECK(result.output.find("warning") != std::string::npos);
    }
    SUBCASE("json format carries the strata") {
        const auto result =
            run(cli_path() + " diagnose " + q(gaussian) + " --seed 2 --format json");
        CHECK(result.exit_code == 0);
        const auto report = nlohmann::json::parse(result.output);
        CHECK(report.contains("strata"));
        CHECK(report["strata"].size() >= 2);
    }
    SUBCASE("json and text agree on the ancova model") {
        const auto result = run(cli_path() + " diagnose " + q(gaussian) +
                                " --seed 2 --model ancova --format json");
        CHECK(result.exit_code == 0);
        CHECK(nlohmann::json::parse(result.output)["overall"] == "supports_effect_reading");
    }
}

TEST_CASE("usage errors exit 2") {
    CHECK(run(cli_path() + " ").exit_code == 2);
    CHECK(run(cli_path() + " frobnicate").exit_code == 2);
    CHECK(run(cli_path() + " analyze").exit_code == 2);
    CHECK(run(cli_path() + " --help").exit_code == 0);
}
