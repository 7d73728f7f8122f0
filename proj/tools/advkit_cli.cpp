// advkit command-line tool: thin shell over the library.
// Exit codes: 0 success, 2 usage, 3 config validation, 4 data, 5 runtime.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "advkit/config.hpp"
#include "advkit/derived.hpp"
#include "advkit/experiments.hpp"

namespace fs = std::filesystem;
using namespace advkit;

namespace {

void fail_json(const char* kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

fs::path data_cache_dir() {
    if (const char* env = std::getenv("ADVKIT_DATA_DIR")) return fs::path(env);
    return fs::path("data");
}

RunConfig resolve_config(const std::string& config_arg, const std::string& name,
                         const std::string& profile) {
    RunConfig base = default_config(name, profile);
    if (config_arg.empty() || config_arg == "default") return base;
    json merged = serialize_config(base);
    merged.update(read_json(config_arg), /*merge_objects=*/true);
    RunConfig cfg = parse_config(merged);
    cfg.experiment.name = name;
    cfg.experiment.profile = profile;
    return cfg;
}

int cmd_gen_data(const DatasetConfig& d, const fs::path& out) {
    fs::create_directories(out);
    LabeledDataset train, test;
    if (d.source == "alphabet") {
        AlphabetSpec spec;
        spec.train_per_class = d.train_per_class;
        spec.test_per_class = d.test_per_class;
        spec.image_side = d.image_side;
        spec.noise_amplitude = static_cast<float>(d.noise_amplitude);
        spec.seed = d.seed;
        auto ds = generate_alphabet(spec);
        train = std::move(ds.train);
        test = std::move(ds.test);
    } else if (d.source == "objects") {
        SyntheticObjectsSpec spec{d.train_per_class, d.test_per_class, d.seed};
        train = generate_objects_split(spec, Split::train);
        test = generate_objects_split(spec, Split::test);
    } else if (d.source == "identities") {
        IdentitySetSpec spec;
        spec.identity_count = d.identity_count;
        spec.images_per_identity = d.images_per_identity;
        spec.seed = d.seed;
        auto ids = generate_identities(spec);
        train = std::move(ids.train);
        test = std::move(ids.test);
    } else if (d.source == "cifar10") {
        auto ds = load_cifar10(d.path);
        train = std::move(ds.train);
        test = std::move(ds.test);
    } else {
        throw ConfigError("unknown dataset source: " + d.source);
    }
    save_dataset(train, out / "train.bin");
    save_dataset(test, out / "test.bin");
    const json manifest = {{"source", d.source},
                           {"seed", d.seed},
                           {"train_items", train.items.size()},
                           {"test_items", test.items.size()},
                           {"class_count", train.class_count},
                           {"train_hash", hash_hex(train.content_hash())},
                           {"test_hash", hash_hex(test.content_hash())}};
    write_json(manifest, out / "manifest.json");
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out) {
    const LabeledDataset train = load_dataset(data_dir / "train.bin");
    Classifier model = Classifier::train(train, cfg.model.architecture, cfg.train);
    json metrics = {{"train_accuracy", accuracy(model, train)}};
    if (fs::exists(data_dir / "test.bin"))
        metrics["test_accuracy"] = accuracy(model, load_dataset(data_dir / "test.bin"));
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    model.save(out, cfg.train.seed, metrics);
    std::cout << metrics.dump(2) << "\n";
    return 0;
}

int cmd_attack(const AttackConfig& acfg, const fs::path& model_path, const fs::path& data_path,
               const fs::path& out) {
    acfg.validate();
    const Classifier model = Classifier::load(model_path);
    const LabeledDataset input = load_dataset(data_path);
    LabeledDataset output = input;
    std::size_t successes = 0;
    double mean_linf = 0.0;
    for (std::size_t i = 0; i < input.items.size(); ++i) {
        AttackConfig item_cfg = acfg;
        item_cfg.seed = derive_seed(acfg.seed, 0x636c69ULL, i);
        const auto& [x, y] = input.items[i];
        AttackResult res = attack(model, x, y, item_cfg);
        if (res.success) ++successes;
        mean_linf += linf_dist(res.adversarial, x);
        output.items[i].first = std::move(res.adversarial);
    }
    fs::create_directories(out);
    save_dataset(output, out / "adversarial.bin");
    const json summary = {{"attack", acfg.to_json()},
                          {"items", input.items.size()},
                          {"success_rate", static_cast<double>(successes) / input.items.size()},
                          {"mean_linf", mean_linf / static_cast<double>(input.items.size())},
                          {"input_hash", hash_hex(input.content_hash())},
                          {"output_hash", hash_hex(output.content_hash())}};
    write_json(summary, out / "summary.json");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_uap(const fs::path& model_path, const fs::path& data_path, int target, double epsilon,
            int epochs, double step_size, std::uint64_t seed, const fs::path& out) {
    const Classifier model = Classifier::load(model_path);
    const LabeledDataset data = load_dataset(data_path);
    UniversalPerturbation uap =
        train_uap(model, data, target, epsilon, epochs, step_size, seed);
    uap.fooling_rate = fooling_rate(model, data, uap);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    uap.save(out);
    std::cout << json{{"target_class", uap.target_class},
                      {"epsilon", uap.epsilon},
                      {"fooling_rate", uap.fooling_rate}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_distort(const DistortionSchedule& sched, const fs::path& model_path,
                const fs::path& data_path, const fs::path& out) {
    sched.validate();
    Classifier model;
    const Classifier* model_ptr = nullptr;
    if (sched.kind == DistortionKind::adversarial) {
        if (model_path.empty())
            throw ConfigError("adversarial distortion requires --model");
        model = Classifier::load(model_path);
        model_ptr = &model;
    }
    const LabeledDataset data = load_dataset(data_path);
    const auto levels = build_distorted_testset(data, model_ptr, sched);
    fs::create_directories(out);
    json summary = {{"kind", kind_name(sched.kind)}, {"levels", json::object()}};
    for (const auto& [lvl, ds] : levels) {
        const auto path = out / ("level_" + std::to_string(lvl) + ".bin");
        save_dataset(ds, path);
        summary["levels"][std::to_string(lvl)] = hash_hex(ds.content_hash());
    }
    write_json(summary, out / "summary.json");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_run_experiment(const RunConfig& cfg, const fs::path& out) {
    const ExperimentReport report = run_experiment(cfg, out);
    std::cout << json{{"experiment", report.experiment},
                      {"out", out.string()},
                      {"metrics", report.metrics}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_report(const fs::path& in_dir, const std::string& format) {
    const ExperimentReport report = ExperimentReport::from_json(read_json(in_dir / "report.json"));
    if (format == "csv") {
        const std::string csv = report_to_csv(report);
        std::ofstream f(in_dir / "report.csv");
        if (!f) throw DataError("cannot write report.csv");
        f << csv;
        std::cout << csv;
    } else if (format == "json") {
        std::cout << report.to_json().dump(2) << "\n";
    } else if (format == "plots") {
        for (const auto& p : emit_plots(report, in_dir / "plots"))
            std::cout << p.string() << "\n";
    } else {
        throw UsageError("unknown report format: " + format);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial attack toolkit"};
    app.require_subcommand(1);

    // gen-data
    DatasetConfig dcfg;
    std::string gen_out = (data_cache_dir() / "out").string();
    auto* gen = app.add_subcommand("gen-data", "generate or import a dataset");
    gen->add_option("--source", dcfg.source, "alphabet | objects | identities | cifar10");
    gen->add_option("--path", dcfg.path, "cifar10 archive directory");
    gen->add_option("--seed", dcfg.seed);
    gen->add_option("--train-per-class", dcfg.train_per_class);
    gen->add_option("--test-per-class", dcfg.test_per_class);
    gen->add_option("--image-side", dcfg.image_side);
    gen->add_option("--noise-amplitude", dcfg.noise_amplitude);
    gen->add_option("--identity-count", dcfg.identity_count);
    gen->add_option("--images-per-identity", dcfg.images_per_identity);
    gen->add_option("--out", gen_out, "output directory");

    // shared config/model/data flags
    std::string config_arg = "default", train_data, train_out = "model.bin";
    auto* train = app.add_subcommand("train", "train a classifier");
    train->add_option("--config", config_arg, "config file or 'default'");
    train->add_option("--data", train_data, "directory containing train.bin")->required();
    train->add_option("--out", train_out, "model blob path");

    AttackConfig acfg;
    std::string atk_method = "FGSM", atk_model, atk_data, atk_out = "attack_out";
    auto* atk = app.add_subcommand("attack", "attack a dataset against a model");
    atk->add_option("--method", atk_method, "FGSM | I-FGSM | MI-FGSM | DI2-FGSM | D-MI2-FGSM");
    atk->add_option("--epsilon", acfg.epsilon);
    atk->add_option("--step-size", acfg.step_size);
    atk->add_option("--iterations", acfg.iterations);
    atk->add_option("--momentum-decay", acfg.momentum_decay);
    atk->add_option("--diversity-prob", acfg.diversity_prob);
    atk->add_flag("--targeted", acfg.targeted);
    atk->add_option("--target", acfg.target);
    atk->add_option("--seed", acfg.seed);
    atk->add_option("--model", atk_model)->required();
    atk->add_option("--data", atk_data, "dataset .bin file")->required();
    atk->add_option("--out", atk_out, "output directory");

    std::string uap_model, uap_data, uap_out = "uap.bin";
    int uap_target = 0, uap_epochs = 3;
    double uap_eps = 16.0 / 255.0, uap_step = 1.0 / 255.0;
    std::uint64_t uap_seed = 0;
    auto* uap = app.add_subcommand("uap", "train a universal adversarial perturbation");
    uap->add_option("--model", uap_model)->required();
    uap->add_option("--data", uap_data)->required();
    uap->add_option("--target", uap_target)->required();
    uap->add_option("--epsilon", uap_eps);
    uap->add_option("--epochs", uap_epochs);
    uap->add_option("--step-size", uap_step);
    uap->add_option("--seed", uap_seed);
    uap->add_option("--out", uap_out);

    DistortionSchedule sched;
    std::string dist_kind = "gaussian", dist_model, dist_data, dist_out = "distort_out";
    auto* dist = app.add_subcommand("distort", "build level-graded distorted test sets");
    dist->add_option("--kind", dist_kind, "gaussian | adversarial");
    dist->add_option("--levels", sched.levels);
    dist->add_option("--steps-per-level", sched.steps_per_level);
    dist->add_option("--adversarial-step", sched.adversarial_step);
    dist->add_option("--gaussian-variance", sched.gaussian_variance);
    dist->add_option("--seed", sched.seed);
    dist->add_option("--model", dist_model, "required for adversarial distortion");
    dist->add_option("--data", dist_data)->required();
    dist->add_option("--out", dist_out);

    std::string exp_name, exp_profile = "reduced", exp_out = "runs/out";
    auto* runexp = app.add_subcommand("run-experiment", "run a named experiment end to end");
    runexp->add_option("--name", exp_name)->required();
    runexp->add_option("--profile", exp_profile, "reduced | full");
    runexp->add_option("--config", config_arg, "config file or 'default'");
    runexp->add_option("--out", exp_out, "run directory");

    std::string rep_in, rep_format = "csv";
    auto* rep = app.add_subcommand("report", "re-emit report artifacts from report.json");
    rep->add_option("--in", rep_in, "run directory")->required();
    rep->add_option("--format", rep_format, "csv | json | plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail_json("usage", e.what());
        return 2;
    }

    try {
        if (*gen) return cmd_gen_data(dcfg, gen_out);
        if (*train) {
            RunConfig cfg = resolve_config(config_arg, "uap_probe", "reduced");
            return cmd_train(cfg, train_data, train_out);
        }
        if (*atk) {
            acfg.method = parse_method(atk_method);
            if (acfg.method == AttackMethod::FGSM && !atk->count("--iterations"))
                acfg.iterations = 1;
            return cmd_attack(acfg, atk_model, atk_data, atk_out);
        }
        if (*uap)
            return cmd_uap(uap_model, uap_data, uap_target, uap_eps, uap_epochs, uap_step,
                           uap_seed, uap_out);
        if (*dist) {
            sched.kind = parse_distortion_kind(dist_kind);
            return cmd_distort(sched, dist_model, dist_data, dist_out);
        }
        if (*runexp)
            return cmd_run_experiment(resolve_config(config_arg, exp_name, exp_profile), exp_out);
        if (*rep) return cmd_report(rep_in, rep_format);
        fail_json("usage", "no subcommand given");
        return 2;
    } catch (const UsageError& e) {
        fail_json("usage", e.what());
        return 2;
    } catch (const ConfigError& e) {
        fail_json("config", e.what());
        return 3;
    } catch (const DataError& e) {
        fail_json("data", e.what());
        return 4;
    } catch (const CapabilityError& e) {
        fail_json("capability", e.what());
        return 5;
    } catch (const std::exception& e) {
        fail_json("runtime", e.what());
        return 5;
    }
}
