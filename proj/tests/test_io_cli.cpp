#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "wvd/commands.hpp"
#include "wvd/errors.hpp"
#include "wvd/experiment.hpp"
#include "wvd/io.hpp"

using namespace wvd;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "wvd");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wvd_tests_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_json(const fs::path& path, const json& doc) {
    std::ofstream(path) << doc.dump(2);
    return path;
}

}  // namespace

TEST_SUITE("io_cli") {
    TEST_CASE("sequence json round trip") {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> normal;
        auto theta = MultiresSequence::zeros(2, 5);
        for (int j = 2; j <= 5; ++j) {
            for (double& v : theta.level(j)) v = normal(rng);
        }
        const auto doc = sequence_to_json(theta);
        CHECK(sequence_from_json(json::parse(doc.dump())) == theta);
        CHECK_THROWS_AS((void)sequence_from_json(json{{"j0", 1}}), ValidationError);
        CHECK_THROWS_AS((void)sequence_from_json(json{{"j0", 1}, {"levels", {{1.0, 2.0, 3.0}}}}), ValidationError);
        CHECK_THROWS_AS((void)sequence_from_json(json{{"j0", 1}, {"levels", {{"a", 2.0}}}}), ValidationError);
    }

    TEST_CASE("experiment config round trip and strictness") {
        const json doc = {{"gamma", {{"alpha", 0.75}, {"p", 1.0}, {"q", 1.0}, {"beta", 0.5}}},
                          {"signal", {{"kind", "shell_sparse"}}},
                          {"noise", {{"covariance", "tridiagonal"}, {"rho", 0.3}}},
                          {"epsilons", {0.01, 0.005}}};
        const auto cfg = experiment_from_json(doc);
        CHECK(cfg.penalty.beta == 0.5);
        CHECK(cfg.penalty.xi1 == doctest::Approx(1.6));
        CHECK(cfg.uses_log_correction());
        const auto echo = experiment_to_json(cfg);
        const auto again = experiment_from_json(json::parse(echo.dump()));
        CHECK(experiment_to_json(again) == echo);

        CHECK_THROWS_AS((void)experiment_from_json(json{{"gamma", {{"alpha", 0.4}, {"p", 1.0}, {"beta", 1.0}}}}),
                        ValidationError);
        CHECK_THROWS_AS((void)experiment_from_json(json{{"epsilon", 0.1}}), ValidationError);
        CHECK_THROWS_AS((void)experiment_from_json(json{{"replicates", "many"}}), ValidationError);
        CHECK_THROWS_AS((void)experiment_from_json(json{{"penalty", {{"zeta", 1.0}}}}), ValidationError);
    }

    TEST_CASE("csv writers") {
        McResult a;
        a.epsilon = 0.01;
        a.mean_sse = 2.0;
        a.replicates = 10;
        McResult b = a;
        b.epsilon = 0.001;
        const auto csv = sweep_to_csv({a, b});
        CHECK(csv.rfind("epsilon,mean_sse,stderr,replicates\n", 0) == 0);
        CHECK(csv.find("0.001") < csv.find("0.01,"));

        const auto profile = shell_profile({1.0, 2.0, 2.0, 0.5}, 1.0, 0.01, 2.0, 0.5);
        const auto text = profile_to_csv(profile);
        CHECK(text.rfind("j,R_j,zone_label\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(profile.j.size()));
        CHECK(number_or_null(INFINITY).is_null());
    }

    TEST_CASE("cli estimate") {
        const auto dir = scratch_dir("estimate");
        const auto zero = write_json(dir / "zero.json", sequence_to_json(MultiresSequence::zeros(1, 4)));
        auto ok = run({"estimate", "--input", zero.string(), "--epsilon", "0.1", "--out", (dir / "out").string()});
        CHECK(ok.code == kExitOk);
        const auto fit = read_json_file(dir / "out" / "fit.json");
        CHECK(fit["fit"]["levels"].size() == 4);
        CHECK(fit["fit"]["levels"][0]["k_hat"] == 0);
        CHECK(fit["fit"]["levels"][0]["threshold"].is_null());

        const auto bad = write_json(dir / "bad.json", json{{"j0", 1}, {"levels", {{0.0, 0.0}, {1.0, 2.0, 3.0}}}});
        auto failed = run({"estimate", "--input", bad.string()});
        CHECK(failed.code == kExitValidation);
        CHECK(failed.err.find("level length") != std::string::npos);

        CHECK(run({"estimate", "--input", (dir / "missing.json").string()}).code == kExitValidation);
        CHECK(run({"estimate"}).code == kExitValidation);
        CHECK(run({"frobnicate"}).code == kExitValidation);
    }

    TEST_CASE("cli rates") {
        const auto dir = scratch_dir("rates");
        auto critical = run({"rates", "--alpha", "1", "--p", "1", "--q", "2", "--beta", "0.5", "--epsilon", "0.001",
                             "--out", dir.string()});
        REQUIRE(critical.code == kExitOk);
        const auto doc = read_json_file(dir / "rates.json");
        CHECK(doc["report"]["zone"] == "Critical");
        CHECK(doc["report"]["r"].get<double>() == doctest::Approx(0.5));
        CHECK(fs::exists(dir / "profile.csv"));

        CHECK(run({"rates", "--alpha", "0.4", "--p", "1", "--q", "1", "--beta", "1"}).code == kExitValidation);
        CHECK(run({"rates", "--epsilon", "2"}).code == kExitValidation);
        CHECK(run({"rates", "--zone", "dens"}).code == kExitValidation);
    }

    TEST_CASE("cli sweep") {
        const auto dir = scratch_dir("sweep");
        const json base = {{"epsilons", {0.0625, 0.03125, 0.015625, 0.0078125}}, {"replicates", 6}};
        const auto cfg = write_json(dir / "cfg.json", base);
        auto first = run({"sweep", "--config", cfg.string(), "--out", (dir / "a").string()});
        auto second = run({"sweep", "--config", cfg.string(), "--threads", "3", "--out", (dir / "b").string()});
        REQUIRE(first.code == kExitOk);
        REQUIRE(second.code == kExitOk);
        std::ifstream a(dir / "a" / "sweep.csv");
        std::ifstream b(dir / "b" / "sweep.csv");
        const std::string text_a{std::istreambuf_iterator<char>(a), {}};
        const std::string text_b{std::istreambuf_iterator<char>(b), {}};
        CHECK(text_a == text_b);
        CHECK(std::count(text_a.begin(), text_a.end(), '\n') == 5);

        auto single = base;
        single["epsilons"] = {0.01};
        const auto single_cfg = write_json(dir / "single.json", single);
        CHECK(run({"sweep", "--config", single_cfg.string()}).code == kExitValidation);

        auto strict = base;
        strict["rate_tolerance"] = 1e-9;
        const auto strict_cfg = write_json(dir / "strict.json", strict);
        CHECK(run({"sweep", "--config", strict_cfg.string()}).code == kExitCheckFailed);

        auto unknown = base;
        unknown["colour"] = "blue";
        const auto unknown_cfg = write_json(dir / "unknown.json", unknown);
        CHECK(run({"sweep", "--config", unknown_cfg.string()}).code == kExitValidation);
    }

    TEST_CASE("cli oracle-check") {
        const auto dir = scratch_dir("oracle");
        const auto cfg = write_json(dir / "cfg.json", json{{"epsilons", {0.03125}}, {"replicates", 10}});
        auto result = run({"oracle-check", "--config", cfg.string(), "--instances", "10", "--n-max", "6", "--out",
                           dir.string()});
        CHECK(result.code == kExitOk);
        const auto doc = read_json_file(dir / "oracle_check.json");
        CHECK(doc["equivalence"]["instances"] == 120);
        CHECK(doc["equivalence"]["mismatches"] == 0);
        CHECK(doc["pass"] == true);
    }
}
