#pragma once

// Derived datasets: adversarially relabeled D_adv, imbalanced D_imb, and
// adversarially augmented D_aug, each with a provenance manifest that makes
// the construction reproducible from (source id, manifest, seed).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "advkit/attacks.hpp"
#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/rng.hpp"

namespace advkit {

struct DerivedItemProvenance {
    std::size_t source_index = 0;
    int original_label = -1;
    int assigned_target = -1;
    bool attack_succeeded = false;
};

struct DerivedDatasetManifest {
    std::string kind;  // "D_adv", "D_imb", "D_aug"
    std::string source_dataset_hash;
    json attack_config;  // null when no attack involved
    std::uint64_t seed = 0;
    json params = json::object();  // builder parameters needed to rebuild
    std::vector<int> per_class_counts;
    std::vector<DerivedItemProvenance> provenance;  // derived/augmented items only
    double attack_failure_rate = 0.0;
    std::string result_hash;

    json to_json() const {
        json prov = json::array();
        for (const auto& p : provenance)
            prov.push_back({{"source_index", p.source_index},
                            {"original_label", p.original_label},
                            {"assigned_target", p.assigned_target},
                            {"attack_succeeded", p.attack_succeeded}});
        return {{"kind", kind},
                {"source_dataset_hash", source_dataset_hash},
                {"attack_config", attack_config},
                {"seed", seed},
                {"params", params},
                {"per_class_counts", per_class_counts},
                {"attack_failure_rate", attack_failure_rate},
                {"result_hash", result_hash},
                {"provenance", prov}};
    }

    static DerivedDatasetManifest from_json(const json& j) {
        DerivedDatasetManifest m;
        m.kind = j.at("kind").get<std::string>();
        m.source_dataset_hash = j.at("source_dataset_hash").get<std::string>();
        m.attack_config = j.value("attack_config", json());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.params = j.value("params", json::object());
        m.per_class_counts = j.value("per_class_counts", std::vector<int>{});
        m.attack_failure_rate = j.value("attack_failure_rate", 0.0);
        m.result_hash = j.value("result_hash", std::string());
        for (const auto& p : j.value("provenance", json::array()))
            m.provenance.push_back({p.at("source_index").get<std::size_t>(),
                                    p.at("original_label").get<int>(),
                                    p.at("assigned_target").get<int>(),
                                    p.at("attack_succeeded").get<bool>()});
        return m;
    }
};

namespace detail {

inline std::vector<int> class_counts(const LabeledDataset& ds) {
    std::vector<int> counts(ds.class_count, 0);
    for (const auto& [img, y] : ds.items) ++counts[y];
    return counts;
}

}  // namespace detail

struct AdvDataset {
    LabeledDataset dataset;
    DerivedDatasetManifest manifest;
};

// For each (x, y): draw target t != y uniformly, run the targeted attack
// toward t, emit (x', t). Failed attacks are kept; the failure rate is
// recorded in the manifest.
inline AdvDataset build_adv_dataset(const LabeledDataset& d_ori, const Classifier& model,
                                    const AttackConfig& cfg, std::uint64_t seed) {
    if (d_ori.items.empty()) throw ConfigError("build_adv_dataset: empty source");
    AdvDataset out;
    out.dataset.class_count = d_ori.class_count;
    out.dataset.split = d_ori.split;
    out.manifest.kind = "D_adv";
    out.manifest.source_dataset_hash = hash_hex(d_ori.content_hash());
    out.manifest.attack_config = cfg.to_json();
    out.manifest.seed = seed;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < d_ori.items.size(); ++i) {
        const auto& [x, y] = d_ori.items[i];
        Rng rng(derive_seed(seed, 0x61647631ULL, i));
        int t = uniform_int(rng, 0, d_ori.class_count - 2);
        if (t >= y) ++t;  // uniform over classes \ {y}
        AttackConfig item_cfg = cfg;
        item_cfg.targeted = true;
        item_cfg.target = t;
        item_cfg.seed = derive_seed(seed, 0x61647632ULL, i);
        AttackResult res = attack(model, x, y, item_cfg);
        if (!res.success) ++failures;
        out.manifest.provenance.push_back({i, y, t, res.success});
        out.dataset.items.emplace_back(std::move(res.adversarial), t);
    }
    out.manifest.attack_failure_rate =
        static_cast<double>(failures) / static_cast<double>(d_ori.items.size());
    out.manifest.per_class_counts = detail::class_counts(out.dataset);
    out.manifest.result_hash = hash_hex(out.dataset.content_hash());
    return out;
}

struct ImbalancedDataset {
    LabeledDataset dataset;
    DerivedDatasetManifest manifest;
};

// Non-reduced classes copied in full; reduced classes subsampled uniformly
// without replacement to `fraction` of their original count.
inline ImbalancedDataset build_imbalanced(const LabeledDataset& d_ori,
                                          const std::set<int>& reduced_classes, double fraction,
                                          std::uint64_t seed) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw ConfigError("build_imbalanced: fraction must be in (0,1]");
    for (int c : reduced_classes)
        if (c < 0 || c >= d_ori.class_count)
            throw ConfigError("build_imbalanced: reduced class out of range");
    ImbalancedDataset out;
    out.dataset.class_count = d_ori.class_count;
    out.dataset.split = d_ori.split;
    out.manifest.kind = "D_imb";
    out.manifest.source_dataset_hash = hash_hex(d_ori.content_hash());
    out.manifest.seed = seed;
    out.manifest.params = {{"reduced_classes", reduced_classes}, {"fraction", fraction}};
    // canonical ordering: by source index
    std::vector<std::size_t> kept;
    for (int c = 0; c < d_ori.class_count; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < d_ori.items.size(); ++i)
            if (d_ori.items[i].second == c) idx.push_back(i);
        if (reduced_classes.count(c) != 0) {
            Rng rng(derive_seed(seed, 0x696d62ULL, c));
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(static_cast<std::size_t>(idx.size() * fraction));
        }
        kept.insert(kept.end(), idx.begin(), idx.end());
    }
    std::sort(kept.begin(), kept.end());
    for (std::size_t i : kept) {
        out.dataset.items.push_back(d_ori.items[i]);
        out.manifest.provenance.push_back(
            {i, d_ori.items[i].second, d_ori.items[i].second, false});
    }
    out.manifest.per_class_counts = detail::class_counts(out.dataset);
    out.manifest.result_hash = hash_hex(out.dataset.content_hash());
    return out;
}

struct AugmentedDataset {
    LabeledDataset dataset;
    DerivedDatasetManifest manifest;
    std::set<int> reduced_classes;
};

// For each reduced class c: sample source images uniformly from the
// non-reduced classes in D_imb, attack them toward c, and append
// round(fraction * original class size) items labeled c.
inline AugmentedDataset build_augmented(const LabeledDataset& d_imb,
                                        const std::set<int>& reduced_classes,
                                        int per_class_additions, const Classifier& model,
                                        const AttackConfig& cfg, std::uint64_t seed) {
    if (per_class_additions < 1) throw ConfigError("build_augmented: nothing to add");
    std::vector<std::size_t> source_pool;
    for (std::size_t i = 0; i < d_imb.items.size(); ++i)
        if (reduced_classes.count(d_imb.items[i].second) == 0) source_pool.push_back(i);
    if (source_pool.size() < static_cast<std::size_t>(per_class_additions))
        throw ConfigError("build_augmented: not enough non-reduced source images");
    AugmentedDataset out;
    out.dataset = d_imb;  // D_aug strictly contains D_imb
    out.reduced_classes = reduced_classes;
    out.manifest.kind = "D_aug";
    out.manifest.source_dataset_hash = hash_hex(d_imb.content_hash());
    out.manifest.attack_config = cfg.to_json();
    out.manifest.seed = seed;
    out.manifest.params = {{"reduced_classes", reduced_classes},
                           {"per_class_additions", per_class_additions}};
    std::size_t failures = 0, total = 0;
    for (int c : reduced_classes) {
        Rng rng(derive_seed(seed, 0x617567ULL, c));
        std::vector<std::size_t> pool = source_pool;
        std::shuffle(pool.begin(), pool.end(), rng);
        for (int k = 0; k < per_class_additions; ++k) {
            const std::size_t src = pool[k];
            const auto& [x, y] = d_imb.items[src];
            AttackConfig item_cfg = cfg;
            item_cfg.targeted = true;
            item_cfg.target = c;
            item_cfg.seed = derive_seed(seed, 0x61756732ULL, (c << 24) | k);
            AttackResult res = attack(model, x, y, item_cfg);
            if (!res.success) ++failures;
            ++total;
            out.manifest.provenance.push_back({src, y, c, res.success});
            out.dataset.items.emplace_back(std::move(res.adversarial), c);
        }
    }
    out.manifest.attack_failure_rate =
        total > 0 ? static_cast<double>(failures) / static_cast<double>(total) : 0.0;
    out.manifest.per_class_counts = detail::class_counts(out.dataset);
    out.manifest.result_hash = hash_hex(out.dataset.content_hash());
    return out;
}

// Re-run the recorded construction against the original source (and model, for
// attack-based kinds) and check the result hash matches bitwise.
inline LabeledDataset rebuild_from_manifest(const DerivedDatasetManifest& m,
                                            const LabeledDataset& source,
                                            const Classifier* model) {
    if (hash_hex(source.content_hash()) != m.source_dataset_hash)
        throw DataError("rebuild_from_manifest: source dataset hash mismatch");
    LabeledDataset rebuilt;
    if (m.kind == "D_adv") {
        if (model == nullptr) throw ConfigError("rebuild_from_manifest: D_adv needs a model");
        rebuilt = build_adv_dataset(source, *model, AttackConfig::from_json(m.attack_config),
                                    m.seed)
                      .dataset;
    } else if (m.kind == "D_imb") {
        const auto reduced = m.params.at("reduced_classes").get<std::set<int>>();
        rebuilt = build_imbalanced(source, reduced, m.params.at("fraction").get<double>(), m.seed)
                      .dataset;
    } else if (m.kind == "D_aug") {
        if (model == nullptr) throw ConfigError("rebuild_from_manifest: D_aug needs a model");
        const auto reduced = m.params.at("reduced_classes").get<std::set<int>>();
        rebuilt = build_augmented(source, reduced,
                                  m.params.at("per_class_additions").get<int>(), *model,
                                  AttackConfig::from_json(m.attack_config), m.seed)
                      .dataset;
    } else {
        throw DataError("rebuild_from_manifest: unknown kind " + m.kind);
    }
    if (hash_hex(rebuilt.content_hash()) != m.result_hash)
        throw DataError("rebuild_from_manifest: rebuilt dataset hash mismatch");
    return rebuilt;
}

}  // namespace advkit
