#pragma once

// Run configuration file: one JSON document with sections mirroring the typed
// configs one-to-one. Unknown keys are rejected with the offending paths.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "advkit/attacks.hpp"
#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/datasets.hpp"
#include "advkit/distortions.hpp"
#include "advkit/errors.hpp"

namespace advkit {

struct DatasetConfig {
    std::string source = "objects";  // alphabet | objects | cifar10 | identities
    std::string path;                // cifar10 archive directory
    std::uint64_t seed = 0;
    // alphabet / objects
    int train_per_class = 500;
    int test_per_class = 100;
    int image_side = 28;
    double noise_amplitude = 0.3;
    // identities
    int identity_count = 24;
    int images_per_identity = 12;
};

struct ModelConfig {
    std::string architecture = "conv:16x3,relu,avgpool:2,conv:32x3,relu,avgpool:2,dense:64,relu,dense:10";
};

struct ExperimentConfig {
    std::string name = "uap_probe";
    std::string profile = "reduced";  // full | reduced
    std::uint64_t seed = 0;
    // universal perturbations need a visibly larger budget than per-image attacks
    double uap_epsilon = 64.0 / 255.0;
    int uap_epochs = 3;
    double uap_step_size = 1.0 / 255.0;
    int augmentation_trials = 3;
    // f_aug / control models continue from the f_imb snapshot for this many
    // epochs; retraining from scratch swamps the effect with optimizer noise
    int augmentation_finetune_epochs = 15;
};

struct RunConfig {
    DatasetConfig dataset;
    ModelConfig model;
    TrainConfig train;
    AttackConfig attack;
    DistortionSchedule distortion;
    ExperimentConfig experiment;
};

namespace cfgdetail {

inline void check_keys(const json& j, const std::string& section,
                       const std::set<std::string>& allowed, std::vector<std::string>& bad) {
    for (const auto& [k, v] : j.items())
        if (allowed.find(k) == allowed.end()) bad.push_back(section + "." + k);
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace cfgdetail

inline json serialize_config(const RunConfig& c) {
    return {
        {"dataset",
         {{"source", c.dataset.source},
          {"path", c.dataset.path},
          {"seed", c.dataset.seed},
          {"train_per_class", c.dataset.train_per_class},
          {"test_per_class", c.dataset.test_per_class},
          {"image_side", c.dataset.image_side},
          {"noise_amplitude", c.dataset.noise_amplitude},
          {"identity_count", c.dataset.identity_count},
          {"images_per_identity", c.dataset.images_per_identity}}},
        {"model", {{"architecture", c.model.architecture}}},
        {"train",
         {{"optimizer", c.train.optimizer},
          {"learning_rate", c.train.learning_rate},
          {"epochs", c.train.epochs},
          {"batch_size", c.train.batch_size},
          {"balanced_loss", c.train.balanced_loss},
          {"seed", c.train.seed}}},
        {"attack", c.attack.to_json()},
        {"distortion", c.distortion.to_json()},
        {"experiment",
         {{"name", c.experiment.name},
          {"profile", c.experiment.profile},
          {"seed", c.experiment.seed},
          {"uap_epsilon", c.experiment.uap_epsilon},
          {"uap_epochs", c.experiment.uap_epochs},
          {"uap_step_size", c.experiment.uap_step_size},
          {"augmentation_trials", c.experiment.augmentation_trials},
          {"augmentation_finetune_epochs", c.experiment.augmentation_finetune_epochs}}},
    };
}

inline RunConfig parse_config(const json& j) {
    using namespace cfgdetail;
    std::vector<std::string> bad;
    check_keys(j, "",
               {"dataset", "model", "train", "attack", "distortion", "experiment"}, bad);
    RunConfig c;
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        check_keys(d, "dataset",
                   {"source", "path", "seed", "train_per_class", "test_per_class", "image_side",
                    "noise_amplitude", "identity_count", "images_per_identity"},
                   bad);
        get_if(d, "source", c.dataset.source);
        get_if(d, "path", c.dataset.path);
        get_if(d, "seed", c.dataset.seed);
        get_if(d, "train_per_class", c.dataset.train_per_class);
        get_if(d, "test_per_class", c.dataset.test_per_class);
        get_if(d, "image_side", c.dataset.image_side);
        get_if(d, "noise_amplitude", c.dataset.noise_amplitude);
        get_if(d, "identity_count", c.dataset.identity_count);
        get_if(d, "images_per_identity", c.dataset.images_per_identity);
    }
    if (j.contains("model")) {
        check_keys(j["model"], "model", {"architecture"}, bad);
        get_if(j["model"], "architecture", c.model.architecture);
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        check_keys(t, "train",
                   {"optimizer", "learning_rate", "epochs", "batch_size", "balanced_loss", "seed"},
                   bad);
        get_if(t, "optimizer", c.train.optimizer);
        get_if(t, "learning_rate", c.train.learning_rate);
        get_if(t, "epochs", c.train.epochs);
        get_if(t, "batch_size", c.train.batch_size);
        get_if(t, "balanced_loss", c.train.balanced_loss);
        get_if(t, "seed", c.train.seed);
    }
    if (j.contains("attack")) {
        const auto& a = j["attack"];
        check_keys(a, "attack",
                   {"method", "epsilon", "step_size", "iterations", "momentum_decay",
                    "diversity_prob", "targeted", "target", "seed"},
                   bad);
        json full = c.attack.to_json();
        full.update(a);
        c.attack = AttackConfig::from_json(full);
    }
    if (j.contains("distortion")) {
        const auto& d = j["distortion"];
        check_keys(d, "distortion",
                   {"kind", "levels", "steps_per_level", "adversarial_step", "gaussian_variance",
                    "seed"},
                   bad);
        std::string kind = kind_name(c.distortion.kind);
        get_if(d, "kind", kind);
        c.distortion.kind = parse_distortion_kind(kind);
        get_if(d, "levels", c.distortion.levels);
        get_if(d, "steps_per_level", c.distortion.steps_per_level);
        get_if(d, "adversarial_step", c.distortion.adversarial_step);
        get_if(d, "gaussian_variance", c.distortion.gaussian_variance);
        get_if(d, "seed", c.distortion.seed);
    }
    if (j.contains("experiment")) {
        const auto& e = j["experiment"];
        check_keys(e, "experiment",
                   {"name", "profile", "seed", "uap_epsilon", "uap_epochs", "uap_step_size",
                    "augmentation_trials", "augmentation_finetune_epochs"},
                   bad);
        get_if(e, "name", c.experiment.name);
        get_if(e, "profile", c.experiment.profile);
        get_if(e, "seed", c.experiment.seed);
        get_if(e, "uap_epsilon", c.experiment.uap_epsilon);
        get_if(e, "uap_epochs", c.experiment.uap_epochs);
        get_if(e, "uap_step_size", c.experiment.uap_step_size);
        get_if(e, "augmentation_trials", c.experiment.augmentation_trials);
        get_if(e, "augmentation_finetune_epochs", c.experiment.augmentation_finetune_epochs);
    }
    if (!bad.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg);
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_json(path));
}

}  // namespace advkit
