#pragma once

// FGSM-family attacks and universal adversarial perturbations, implemented as
// projected sign-gradient optimization inside the L∞ ε-ball intersected with
// the [0,1] pixel range.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/embedding.hpp"
#include "advkit/errors.hpp"
#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

enum class AttackMethod { FGSM, IFGSM, MIFGSM, DI2FGSM, DMI2FGSM };

inline std::string method_name(AttackMethod m) {
    switch (m) {
        case AttackMethod::FGSM: return "FGSM";
        case AttackMethod::IFGSM: return "I-FGSM";
        case AttackMethod::MIFGSM: return "MI-FGSM";
        case AttackMethod::DI2FGSM: return "DI2-FGSM";
        case AttackMethod::DMI2FGSM: return "D-MI2-FGSM";
    }
    throw ConfigError("bad attack method");
}

inline AttackMethod parse_method(const std::string& s) {
    if (s == "FGSM") return AttackMethod::FGSM;
    if (s == "I-FGSM" || s == "IFGSM") return AttackMethod::IFGSM;
    if (s == "MI-FGSM" || s == "MIFGSM") return AttackMethod::MIFGSM;
    if (s == "DI2-FGSM" || s == "DI2FGSM") return AttackMethod::DI2FGSM;
    if (s == "D-MI2-FGSM" || s == "DMI2FGSM") return AttackMethod::DMI2FGSM;
    throw ConfigError("unknown attack method: " + s);
}

struct AttackConfig {
    AttackMethod method = AttackMethod::FGSM;
    double epsilon = 8.0 / 255.0;
    double step_size = 2.0 / 255.0;
    int iterations = 1;
    double momentum_decay = 1.0;   // MI variants
    double diversity_prob = 0.5;   // DI variants
    bool targeted = false;
    int target = -1;               // class index when targeted
    std::uint64_t seed = 0;

    bool uses_momentum() const {
        return method == AttackMethod::MIFGSM || method == AttackMethod::DMI2FGSM;
    }
    bool uses_diversity() const {
        return method == AttackMethod::DI2FGSM || method == AttackMethod::DMI2FGSM;
    }

    void validate() const {
        if (epsilon < 0) throw ConfigError("epsilon must be >= 0");
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (method == AttackMethod::FGSM && iterations != 1)
            throw ConfigError("FGSM requires iterations = 1");
        if (method != AttackMethod::FGSM && (step_size <= 0 || step_size > epsilon + 1e-12))
            if (epsilon > 0) throw ConfigError("require 0 < step_size <= epsilon");
        if (momentum_decay < 0) throw ConfigError("momentum_decay must be >= 0");
        if (diversity_prob < 0 || diversity_prob > 1)
            throw ConfigError("diversity_prob must be in [0,1]");
        if (targeted && target < 0) throw ConfigError("targeted attack needs a target class");
    }

    json to_json() const {
        return {{"method", method_name(method)}, {"epsilon", epsilon},
                {"step_size", step_size},       {"iterations", iterations},
                {"momentum_decay", momentum_decay}, {"diversity_prob", diversity_prob},
                {"targeted", targeted},         {"target", target},
                {"seed", seed}};
    }

    static AttackConfig from_json(const json& j) {
        AttackConfig c;
        c.method = parse_method(j.at("method").get<std::string>());
        c.epsilon = j.at("epsilon").get<double>();
        c.step_size = j.value("step_size", c.step_size);
        c.iterations = j.value("iterations", 1);
        c.momentum_decay = j.value("momentum_decay", 1.0);
        c.diversity_prob = j.value("diversity_prob", 0.5);
        c.targeted = j.value("targeted", false);
        c.target = j.value("target", -1);
        c.seed = j.value("seed", std::uint64_t{0});
        return c;
    }
};

struct AttackResult {
    Image adversarial;
    bool success = false;
    int iterations_used = 0;
    double final_loss = 0.0;
};

// The scalar objective an attack ascends: gradient of the loss to MAXIMIZE.
// Classification attacks use cross-entropy (negated when targeted);
// verification attacks use the negative cosine similarity to the enrolled
// embedding.
struct AttackObjective {
    std::function<Image(const Image&)> loss_gradient;
    std::function<double(const Image&)> loss;
    std::function<bool(const Image&)> success;
};

inline AttackObjective classification_objective(const Classifier& model, int true_label,
                                                bool targeted, int target) {
    if (targeted) {
        return {
            [&model, target](const Image& x) {
                Image g = model.input_gradient(x, target);
                for (float& v : g.data) v = -v;
                return g;
            },
            [&model, target](const Image& x) { return -cross_entropy(model.logits(x), target); },
            [&model, target](const Image& x) { return model.predict(x) == target; },
        };
    }
    return {
        [&model, true_label](const Image& x) { return model.input_gradient(x, true_label); },
        [&model, true_label](const Image& x) { return cross_entropy(model.logits(x), true_label); },
        [&model, true_label](const Image& x) { return model.predict(x) != true_label; },
    };
}

// Dodging objective against verification: maximize -cosine(embed(x), enrolled).
inline AttackObjective verification_objective(const EmbeddingModel& model, const Vec& enrolled) {
    return {
        [&model, enrolled](const Image& x) {
            Image g = model.cosine_gradient(x, enrolled);
            for (float& v : g.data) v = -v;
            return g;
        },
        [&model, enrolled](const Image& x) {
            return -EmbeddingModel::cosine(model.embed(x), enrolled);
        },
        [&model, enrolled](const Image& x) {
            return EmbeddingModel::cosine(model.embed(x), enrolled) < model.match_threshold();
        },
    };
}

namespace detail {

// Random resize-and-pad input diversity: nearest-neighbor downscale to a side
// in [90%, 100%], zero-pad back at a random offset. Returns the transformed
// image and captures enough to pull gradients back through the transform.
struct DiversityTransform {
    int scaled_h = 0, scaled_w = 0, off_y = 0, off_x = 0;
    bool applied = false;

    Image apply(const Image& x, Rng& rng, double prob) {
        applied = uniform(rng, 0.0f, 1.0f) < static_cast<float>(prob);
        if (!applied) return x;
        const int min_h = std::max(1, static_cast<int>(std::ceil(x.shape.h * 0.9)));
        const int min_w = std::max(1, static_cast<int>(std::ceil(x.shape.w * 0.9)));
        scaled_h = uniform_int(rng, min_h, x.shape.h);
        scaled_w = uniform_int(rng, min_w, x.shape.w);
        off_y = uniform_int(rng, 0, x.shape.h - scaled_h);
        off_x = uniform_int(rng, 0, x.shape.w - scaled_w);
        Image out(x.shape, 0.0f);
        for (int y = 0; y < scaled_h; ++y)
            for (int xx = 0; xx < scaled_w; ++xx) {
                const int sy = y * x.shape.h / scaled_h;
                const int sx = xx * x.shape.w / scaled_w;
                for (int c = 0; c < x.shape.c; ++c)
                    out.at(off_y + y, off_x + xx, c) = x.at(sy, sx, c);
            }
        return out;
    }

    // Vector-Jacobian product of the transform (scatter-add of nearest-neighbor reads).
    Image pullback(const Image& grad, Shape orig) const {
        if (!applied) return grad;
        Image out(orig, 0.0f);
        for (int y = 0; y < scaled_h; ++y)
            for (int xx = 0; xx < scaled_w; ++xx) {
                const int sy = y * orig.h / scaled_h;
                const int sx = xx * orig.w / scaled_w;
                for (int c = 0; c < orig.c; ++c)
                    out.at(sy, sx, c) += grad.at(off_y + y, off_x + xx, c);
            }
        return out;
    }
};

}  // namespace detail

// Projected sign-gradient attack over the given objective.
inline AttackResult attack(const AttackObjective& objective, const Image& x,
                           const AttackConfig& cfg) {
    cfg.validate();
    const float eps = static_cast<float>(cfg.epsilon);
    const float step = (cfg.method == AttackMethod::FGSM) ? eps
                                                          : static_cast<float>(cfg.step_size);
    Rng rng(derive_seed(cfg.seed, 0x6469760aULL));
    Image current = x;
    std::vector<float> momentum(x.size(), 0.0f);
    int iters = 0;
    for (int it = 0; it < cfg.iterations; ++it, ++iters) {
        Image grad;
        if (cfg.uses_diversity()) {
            detail::DiversityTransform t;
            const Image xin = t.apply(current, rng, cfg.diversity_prob);
            grad = t.pullback(objective.loss_gradient(xin), x.shape);
        } else {
            grad = objective.loss_gradient(current);
        }
        const float* dir = grad.data.data();
        if (cfg.uses_momentum()) {
            double l1 = 0.0;
            for (float v : grad.data) l1 += std::abs(v);
            const float inv = (l1 > 0.0) ? static_cast<float>(1.0 / l1) : 0.0f;
            for (std::size_t i = 0; i < momentum.size(); ++i)
                momentum[i] = static_cast<float>(cfg.momentum_decay) * momentum[i] +
                              grad.data[i] * inv;
            dir = momentum.data();
        }
        for (std::size_t i = 0; i < current.data.size(); ++i) {
            const float s = (dir[i] > 0.0f) ? 1.0f : (dir[i] < 0.0f ? -1.0f : 0.0f);
            current.data[i] += step * s;
        }
        current = project_linf(current, x, eps);
    }
    AttackResult res;
    res.adversarial = std::move(current);
    res.success = objective.success(res.adversarial);
    res.iterations_used = iters;
    res.final_loss = objective.loss(res.adversarial);
    return res;
}

// Classification entry point: untargeted flips away from true_label, targeted
// pushes toward cfg.target.
inline AttackResult attack(const Classifier& model, const Image& x, int true_label,
                           const AttackConfig& cfg) {
    return attack(classification_objective(model, true_label, cfg.targeted, cfg.target), x, cfg);
}

// Deterministic image filter applied before the attack (makeup-style
// pre-transform proxy). Provenance of both stages lives in the result's
// adversarial image plus the returned transformed original.
using ImageFilter = std::function<Image(const Image&)>;

struct ComposedAttackResult {
    Image pre_transformed;
    AttackResult attack_result;
};

inline ComposedAttackResult compose_transform_then_attack(const AttackObjective& objective,
                                                          const Image& x,
                                                          const ImageFilter& pre_transform,
                                                          const AttackConfig& cfg) {
    Image tx = pre_transform(x);
    if (!(tx.shape == x.shape)) throw DataError("pre_transform changed image shape");
    for (float v : tx.data)
        if (v < 0.0f || v > 1.0f) throw DataError("pre_transform produced out-of-range values");
    return {tx, attack(objective, tx, cfg)};
}

// 3x3 Gaussian blur plus a mild per-channel shift; stands in for a semantic
// makeup transform in the composition experiment.
inline Image makeup_proxy_filter(const Image& x) {
    static const float k[3] = {0.25f, 0.5f, 0.25f};
    Image tmp(x.shape, 0.0f), out(x.shape, 0.0f);
    for (int y = 0; y < x.shape.h; ++y)
        for (int xx = 0; xx < x.shape.w; ++xx)
            for (int c = 0; c < x.shape.c; ++c) {
                float acc = 0.0f;
                for (int d = -1; d <= 1; ++d) {
                    const int sx = std::clamp(xx + d, 0, x.shape.w - 1);
                    acc += k[d + 1] * x.at(y, sx, c);
                }
                tmp.at(y, xx, c) = acc;
            }
    for (int y = 0; y < x.shape.h; ++y)
        for (int xx = 0; xx < x.shape.w; ++xx)
            for (int c = 0; c < x.shape.c; ++c) {
                float acc = 0.0f;
                for (int d = -1; d <= 1; ++d) {
                    const int sy = std::clamp(y + d, 0, x.shape.h - 1);
                    acc += k[d + 1] * tmp.at(sy, xx, c);
                }
                const float shift = 0.03f * (c == 0 ? 1.0f : (c + 1 == x.shape.c ? -1.0f : 0.0f));
                out.at(y, xx, c) = clamp01(acc + shift);
            }
    return out;
}

// ----------------------------------------------------------------------------
// Universal adversarial perturbations

struct UniversalPerturbation {
    std::vector<float> delta;
    Shape shape;
    int target_class = -1;
    double epsilon = 0.0;
    double fooling_rate = 0.0;  // measured on held-out data when available

    void validate() const {
        for (float v : delta)
            if (std::abs(v) > epsilon + 1e-6)
                throw DataError("UAP delta exceeds epsilon bound");
    }

    void save(const std::filesystem::path& blob_path) const {
        std::ofstream out(blob_path, std::ios::binary);
        if (!out) throw DataError("cannot open for write: " + blob_path.string());
        const char magic[4] = {'A', 'U', 'P', '1'};
        out.write(magic, 4);
        out.write(reinterpret_cast<const char*>(&shape), sizeof(shape));
        out.write(reinterpret_cast<const char*>(delta.data()),
                  static_cast<std::streamsize>(delta.size() * sizeof(float)));
        write_json(json{{"target_class", target_class},
                        {"epsilon", epsilon},
                        {"fooling_rate", fooling_rate},
                        {"shape", {shape.h, shape.w, shape.c}}},
                   blob_path.string() + ".json");
    }

    static UniversalPerturbation load(const std::filesystem::path& blob_path) {
        const json side = read_json(blob_path.string() + ".json");
        UniversalPerturbation u;
        u.target_class = side.at("target_class").get<int>();
        u.epsilon = side.at("epsilon").get<double>();
        u.fooling_rate = side.value("fooling_rate", 0.0);
        std::ifstream in(blob_path, std::ios::binary);
        if (!in) throw DataError("cannot open: " + blob_path.string());
        char magic[4];
        in.read(magic, 4);
        if (!in || std::string(magic, 4) != "AUP1") throw DataError("bad UAP magic");
        in.read(reinterpret_cast<char*>(&u.shape), sizeof(u.shape));
        u.delta.resize(u.shape.size());
        in.read(reinterpret_cast<char*>(u.delta.data()),
                static_cast<std::streamsize>(u.delta.size() * sizeof(float)));
        if (!in) throw DataError("truncated UAP blob");
        return u;
    }
};

// Batched targeted sign-gradient ascent on a shared delta, projected to the
// ε-ball after every step. Gradients pass through the [0,1] clamp only where
// the perturbed pixel is inside the range.
inline UniversalPerturbation train_uap(const Classifier& model, const LabeledDataset& dataset,
                                       int target_class, double epsilon, int epochs,
                                       double step_size, std::uint64_t seed,
                                       int batch_size = 64) {
    if (epsilon <= 0) throw ConfigError("train_uap: epsilon must be > 0");
    if (dataset.items.empty()) throw ConfigError("train_uap: empty dataset");
    if (target_class < 0 || target_class >= model.class_count())
        throw ConfigError("train_uap: target_class out of range");
    const Shape shape = dataset.items.front().first.shape;
    std::vector<float> delta(shape.size(), 0.0f);
    std::vector<std::size_t> order(dataset.items.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x75617000ULL));
    std::vector<float> accum(shape.size());
    const float eps = static_cast<float>(epsilon);
    for (int ep = 0; ep < epochs; ++ep) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i + batch_size <= order.size(); i += batch_size) {
            std::fill(accum.begin(), accum.end(), 0.0f);
            for (std::size_t j = i; j < i + batch_size; ++j) {
                const Image& x = dataset.items[order[j]].first;
                Image xp = apply_perturbation(x, delta);
                Image g = model.input_gradient(xp, target_class);
                for (std::size_t p = 0; p < accum.size(); ++p) {
                    const float raw = x.data[p] + delta[p];
                    if (raw >= 0.0f && raw <= 1.0f) accum[p] += g.data[p];
                }
            }
            for (std::size_t p = 0; p < delta.size(); ++p) {
                const float s = (accum[p] > 0.0f) ? 1.0f : (accum[p] < 0.0f ? -1.0f : 0.0f);
                delta[p] = std::clamp(delta[p] - static_cast<float>(step_size) * s, -eps, eps);
            }
        }
    }
    UniversalPerturbation uap;
    uap.delta = std::move(delta);
    uap.shape = shape;
    uap.target_class = target_class;
    uap.epsilon = epsilon;
    return uap;
}

// Fraction of images redirected to the UAP's target class.
inline double fooling_rate(const Classifier& model, const LabeledDataset& dataset,
                           const UniversalPerturbation& uap) {
    if (dataset.items.empty()) throw ConfigError("fooling_rate: empty dataset");
    std::size_t fooled = 0;
    for (const auto& [img, y] : dataset.items)
        if (model.predict(apply_perturbation(img, uap.delta)) == uap.target_class) ++fooled;
    return static_cast<double>(fooled) / static_cast<double>(dataset.items.size());
}

}  // namespace advkit
