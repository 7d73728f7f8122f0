#pragma once

// Level-graded distortions for the sensitivity experiment. Level k applies
// 5k one-time distortions cumulatively: each adversarial step is an FGSM step
// of size 0.02 against the current iterate's true label; each Gaussian step
// adds an independent N(0, variance) draw. Clamped to [0,1] after every step.

#include <cstdint>
#include <map>
#include <string>

#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

enum class DistortionKind { adversarial, gaussian };

inline std::string kind_name(DistortionKind k) {
    return k == DistortionKind::adversarial ? "adversarial" : "gaussian";
}

inline DistortionKind parse_distortion_kind(const std::string& s) {
    if (s == "adversarial") return DistortionKind::adversarial;
    if (s == "gaussian") return DistortionKind::gaussian;
    throw ConfigError("unknown distortion kind: " + s);
}

struct DistortionSchedule {
    DistortionKind kind = DistortionKind::adversarial;
    int levels = 8;
    int steps_per_level = 5;
    double adversarial_step = 0.02;
    double gaussian_variance = 0.01;  // per one-time draw; std = sqrt(variance)
    std::uint64_t seed = 0;

    void validate() const {
        if (levels < 1 || steps_per_level < 1)
            throw ConfigError("distortion schedule: levels and steps must be >= 1");
        if (adversarial_step <= 0) throw ConfigError("adversarial step must be > 0");
        if (gaussian_variance <= 0) throw ConfigError("gaussian variance must be > 0");
    }

    json to_json() const {
        return {{"kind", kind_name(kind)},
                {"levels", levels},
                {"steps_per_level", steps_per_level},
                {"adversarial_step", adversarial_step},
                {"gaussian_variance", gaussian_variance},
                {"seed", seed}};
    }
};

// Distort one image to the given level. The Gaussian noise stream is fixed by
// (schedule.seed, item_tag), so level k extends level k-1's stream exactly.
inline Image distort(const Image& x, const Classifier* model, const DistortionSchedule& schedule,
                     int level, int true_label = -1, std::uint64_t item_tag = 0) {
    schedule.validate();
    if (level < 0 || level > schedule.levels)
        throw ConfigError("distortion level out of range: " + std::to_string(level));
    if (schedule.kind == DistortionKind::adversarial && model == nullptr)
        throw ConfigError("adversarial distortion requires a model");
    Image cur = x;
    const int steps = level * schedule.steps_per_level;
    if (schedule.kind == DistortionKind::adversarial) {
        const float step = static_cast<float>(schedule.adversarial_step);
        for (int s = 0; s < steps; ++s) {
            const Image g = model->input_gradient(cur, true_label);
            for (std::size_t i = 0; i < cur.data.size(); ++i) {
                const float sg = (g.data[i] > 0.0f) ? 1.0f : (g.data[i] < 0.0f ? -1.0f : 0.0f);
                cur.data[i] = clamp01(cur.data[i] + step * sg);
            }
        }
    } else {
        Rng rng(derive_seed(schedule.seed, 0x676175ULL, item_tag));
        const float stddev = static_cast<float>(std::sqrt(schedule.gaussian_variance));
        for (int s = 0; s < steps; ++s)
            for (float& v : cur.data) v = clamp01(v + gaussian(rng, 0.0f, stddev));
    }
    return cur;
}

// Datasets for levels 0..levels; labels unchanged, deterministic per seed.
inline std::map<int, LabeledDataset> build_distorted_testset(const LabeledDataset& test,
                                                             const Classifier* model,
                                                             const DistortionSchedule& schedule) {
    schedule.validate();
    if (test.items.empty()) throw ConfigError("build_distorted_testset: empty test set");
    std::map<int, LabeledDataset> out;
    for (int lvl = 0; lvl <= schedule.levels; ++lvl) {
        LabeledDataset ds;
        ds.class_count = test.class_count;
        ds.split = test.split;
        out.emplace(lvl, std::move(ds));
    }
    // per-image: run the cumulative walk once, snapshot at level boundaries
    for (std::size_t i = 0; i < test.items.size(); ++i) {
        const auto& [x, y] = test.items[i];
        out[0].items.emplace_back(x, y);
        Image cur = x;
        if (schedule.kind == DistortionKind::adversarial) {
            const float step = static_cast<float>(schedule.adversarial_step);
            for (int lvl = 1; lvl <= schedule.levels; ++lvl) {
                for (int s = 0; s < schedule.steps_per_level; ++s) {
                    const Image g = model->input_gradient(cur, y);
                    for (std::size_t p = 0; p < cur.data.size(); ++p) {
                        const float sg =
                            (g.data[p] > 0.0f) ? 1.0f : (g.data[p] < 0.0f ? -1.0f : 0.0f);
                        cur.data[p] = clamp01(cur.data[p] + step * sg);
                    }
                }
                out[lvl].items.emplace_back(cur, y);
            }
        } else {
            Rng rng(derive_seed(schedule.seed, 0x676175ULL, i));
            const float stddev = static_cast<float>(std::sqrt(schedule.gaussian_variance));
            for (int lvl = 1; lvl <= schedule.levels; ++lvl) {
                for (int s = 0; s < schedule.steps_per_level; ++s)
                    for (float& v : cur.data) v = clamp01(v + gaussian(rng, 0.0f, stddev));
                out[lvl].items.emplace_back(cur, y);
            }
        }
    }
    return out;
}

}  // namespace advkit
