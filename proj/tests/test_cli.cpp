#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "advkit/config.hpp"
#include "advkit/report.hpp"

using namespace advkit;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const char* bin = std::getenv("ADVKIT_CLI");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    std::array<char, 4096> buf;
    while (fgets(buf.data(), buf.size(), pipe) != nullptr) res.output += buf.data();
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("advkit_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    REQUIRE(run_cli("").exit_code == 2);
    REQUIRE(run_cli("frobnicate").exit_code == 2);
    REQUIRE(run_cli("attack --no-such-flag 1").exit_code == 2);
    const auto res = run_cli("report --format csv");  // missing required --in
    REQUIRE(res.exit_code == 2);
    REQUIRE(res.output.find("error") != std::string::npos);
}

TEST_CASE("gen-data produces loadable splits and a manifest") {
    const auto dir = fresh_dir("gendata");
    const auto res = run_cli("gen-data --source objects --train-per-class 3 --test-per-class 2"
                             " --seed 5 --out " + dir.string());
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    const auto train = load_dataset(dir / "train.bin");
    const auto test = load_dataset(dir / "test.bin");
    REQUIRE(train.items.size() == 30u);
    REQUIRE(test.items.size() == 20u);
    const json manifest = read_json(dir / "manifest.json");
    REQUIRE(manifest.at("train_hash").get<std::string>() == hash_hex(train.content_hash()));
    // bad source -> config error
    REQUIRE(run_cli("gen-data --source nonsense --out " + dir.string()).exit_code == 3);
    fs::remove_all(dir);
}

TEST_CASE("train then attack: epsilon 0 leaves images bitwise identical") {
    const auto dir = fresh_dir("pipeline");
    REQUIRE(run_cli("gen-data --source objects --train-per-class 4 --test-per-class 2 --seed 1"
                    " --out " + dir.string()).exit_code == 0);
    // small config so the test stays fast
    const json cfg = {{"model", {{"architecture", "avgpool:4,dense:16,relu,dense:10"}}},
                      {"train", {{"epochs", 2}}}};
    write_json(cfg, dir / "cfg.json");
    const auto model_path = dir / "model.bin";
    const auto tres = run_cli("train --config " + (dir / "cfg.json").string() + " --data " +
                              dir.string() + " --out " + model_path.string());
    CAPTURE(tres.output);
    REQUIRE(tres.exit_code == 0);
    REQUIRE(fs::exists(model_path));

    const auto out0 = dir / "atk0";
    const auto r0 = run_cli("attack --method FGSM --epsilon 0 --model " + model_path.string() +
                            " --data " + (dir / "test.bin").string() + " --out " + out0.string());
    CAPTURE(r0.output);
    REQUIRE(r0.exit_code == 0);
    const auto input = load_dataset(dir / "test.bin");
    const auto zeroed = load_dataset(out0 / "adversarial.bin");
    REQUIRE(zeroed.items.size() == input.items.size());
    for (std::size_t i = 0; i < input.items.size(); ++i)
        REQUIRE(zeroed.items[i].first.data == input.items[i].first.data);

    // nonzero epsilon stays in the ball
    const auto out1 = dir / "atk1";
    REQUIRE(run_cli("attack --method I-FGSM --epsilon 0.05 --step-size 0.01 --iterations 3"
                    " --model " + model_path.string() + " --data " + (dir / "test.bin").string() +
                    " --out " + out1.string()).exit_code == 0);
    const auto attacked = load_dataset(out1 / "adversarial.bin");
    for (std::size_t i = 0; i < input.items.size(); ++i)
        REQUIRE(linf_dist(attacked.items[i].first, input.items[i].first) <= 0.05 + 1e-6);

    // unknown method -> config validation error
    REQUIRE(run_cli("attack --method PGD --model " + model_path.string() + " --data " +
                    (dir / "test.bin").string()).exit_code == 3);
    // missing data file -> data error
    REQUIRE(run_cli("attack --model " + model_path.string() + " --data " +
                    (dir / "nope.bin").string()).exit_code == 4);
    fs::remove_all(dir);
}

TEST_CASE("distort writes one level file per level") {
    const auto dir = fresh_dir("distort");
    REQUIRE(run_cli("gen-data --source objects --train-per-class 2 --test-per-class 1 --seed 2"
                    " --out " + dir.string()).exit_code == 0);
    const auto res = run_cli("distort --kind gaussian --levels 3 --data " +
                             (dir / "test.bin").string() + " --out " + (dir / "lv").string());
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    for (int lvl = 0; lvl <= 3; ++lvl)
        REQUIRE(fs::exists(dir / "lv" / ("level_" + std::to_string(lvl) + ".bin")));
    // adversarial without model -> config error
    REQUIRE(run_cli("distort --kind adversarial --data " + (dir / "test.bin").string() +
                    " --out " + (dir / "lv2").string()).exit_code == 3);
    fs::remove_all(dir);
}

TEST_CASE("report re-emits CSV losslessly from report.json") {
    const auto dir = fresh_dir("report");
    ExperimentReport rep;
    rep.experiment = "unit";
    rep.metrics = {{"alpha", 0.1234567890123456789}, {"beta", 42.0}};
    SensitivityCurve curve;
    curve.kind = "gaussian";
    curve.points = {{0, 0.98}, {1, 1.0 / 3.0}};
    rep.curves.push_back(curve);
    rep.tables["t"] = {{"labels", {"a", "b"}}, {"series", {{"s", {0.25, 0.75}}}}};
    write_json(rep.to_json(), dir / "report.json");

    const auto res = run_cli("report --in " + dir.string() + " --format csv");
    CAPTURE(res.output);
    REQUIRE(res.exit_code == 0);
    // every metric appears with full precision (json round-trip repr)
    REQUIRE(res.output.find("metrics,alpha," + json(0.1234567890123456789).dump()) !=
            std::string::npos);
    REQUIRE(res.output.find("curve:gaussian,level_1," + json(1.0 / 3.0).dump()) !=
            std::string::npos);
    REQUIRE(res.output == report_to_csv(ExperimentReport::from_json(read_json(dir / "report.json"))));

    REQUIRE(run_cli("report --in " + dir.string() + " --format plots").exit_code == 0);
    REQUIRE(fs::exists(dir / "plots" / "curve_gaussian.svg"));
    REQUIRE(fs::exists(dir / "plots" / "table_t.svg"));
    REQUIRE(run_cli("report --in " + dir.string() + " --format yaml").exit_code == 2);
    REQUIRE(run_cli("report --in " + (dir / "missing").string()).exit_code == 4);
    fs::remove_all(dir);
}

TEST_CASE("run-experiment rejects unknown names and bad configs") {
    const auto dir = fresh_dir("runexp");
    REQUIRE(run_cli("run-experiment --name not_an_experiment --out " + dir.string()).exit_code ==
            3);
    json bad = json::object();
    bad["experiment"] = {{"nonsense", 1}};
    write_json(bad, dir / "bad.json");
    const auto res = run_cli("run-experiment --name uap_probe --config " +
                             (dir / "bad.json").string() + " --out " + dir.string());
    REQUIRE(res.exit_code == 3);
    REQUIRE(res.output.find("experiment.nonsense") != std::string::npos);
    fs::remove_all(dir);
}
