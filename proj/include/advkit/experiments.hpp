#pragma once

// End-to-end experiments: train -> derive data -> attack -> measure -> report.
// Each run writes a run directory with spec.json, manifests, checkpoints,
// report.json, report.csv and plots.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "advkit/attacks.hpp"
#include "advkit/classifier.hpp"
#include "advkit/config.hpp"
#include "advkit/datasets.hpp"
#include "advkit/derived.hpp"
#include "advkit/distortions.hpp"
#include "advkit/embedding.hpp"
#include "advkit/metrics.hpp"
#include "advkit/report.hpp"

namespace advkit {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "turing_sensitivity", "reject_verification", "uap_probe", "nonrobust_generalization",
        "adversarial_augmentation"};
    return names;
}

namespace expdetail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

inline LabeledDataset objects_train(const RunConfig& cfg) {
    if (cfg.dataset.source == "cifar10")
        return load_cifar10(cfg.dataset.path).train;
    SyntheticObjectsSpec spec{cfg.dataset.train_per_class, cfg.dataset.test_per_class,
                              cfg.dataset.seed};
    return generate_objects_split(spec, Split::train);
}

inline LabeledDataset objects_test(const RunConfig& cfg) {
    if (cfg.dataset.source == "cifar10")
        return load_cifar10(cfg.dataset.path).test;
    SyntheticObjectsSpec spec{cfg.dataset.train_per_class, cfg.dataset.test_per_class,
                              cfg.dataset.seed};
    return generate_objects_split(spec, Split::test);
}

inline void begin_report(ExperimentReport& report, const std::string& name,
                         const RunConfig& cfg) {
    report.experiment = name;
    report.spec_snapshot = serialize_config(cfg);
}

inline void finish_report(ExperimentReport& report, const Stopwatch& sw,
                          const std::filesystem::path& out_dir) {
    report.wall_clock_seconds = sw.seconds();
    write_report(report, out_dir);
}

}  // namespace expdetail

// ---------------------------------------------------------------------------
// Turing sensitivity: model-side accuracy curves under level-graded
// adversarial and Gaussian distortions of the alphabet test set.

inline ExperimentReport run_turing_sensitivity(const RunConfig& cfg,
                                               const std::filesystem::path& out_dir) {
    expdetail::Stopwatch sw;
    std::filesystem::create_directories(out_dir);
    ExperimentReport report;
    expdetail::begin_report(report, "turing_sensitivity", cfg);

    AlphabetSpec aspec;
    aspec.train_per_class = cfg.dataset.train_per_class;
    aspec.test_per_class = cfg.dataset.test_per_class;
    aspec.image_side = cfg.dataset.image_side;
    aspec.noise_amplitude = static_cast<float>(cfg.dataset.noise_amplitude);
    aspec.seed = cfg.dataset.seed;
    const AlphabetDataset alphabet = generate_alphabet(aspec);
    report.dataset_hashes["alphabet_train"] = hash_hex(alphabet.train.content_hash());
    report.dataset_hashes["alphabet_test"] = hash_hex(alphabet.test.content_hash());

    // The classifier is trained on heavily noise-augmented renders (several
    // max-level Gaussian-walk draws per image, no clean copies): like an OCR
    // system trained on noisy scans it stays stable under Gaussian distortion
    // of any level while remaining fully exposed to adversarial steps.
    DistortionSchedule gauss = cfg.distortion;
    gauss.kind = DistortionKind::gaussian;
    LabeledDataset train = alphabet.train;
    train.items.clear();
    for (std::uint64_t copy = 1; copy <= 4; ++copy)
        for (std::size_t i = 0; i < alphabet.train.items.size(); ++i) {
            const auto& [x, y] = alphabet.train.items[i];
            train.items.emplace_back(distort(x, nullptr, gauss, gauss.levels, y,
                                             derive_seed(cfg.experiment.seed, 0xa0 + copy, i)),
                                     y);
        }

    Classifier model = Classifier::train(train, cfg.model.architecture, cfg.train);
    model.save(out_dir / "character_model.bin", cfg.train.seed);

    DistortionSchedule adv_sched = cfg.distortion;
    adv_sched.kind = DistortionKind::adversarial;
    const auto adv_sets = build_distorted_testset(alphabet.test, &model, adv_sched);
    const auto gau_sets = build_distorted_testset(alphabet.test, nullptr, gauss);

    SensitivityCurve adv_curve = sensitivity_curve(model, adv_sets, "adversarial");
    SensitivityCurve gau_curve = sensitivity_curve(model, gau_sets, "gaussian");
    report.curves = {adv_curve, gau_curve};

    std::vector<double> levels, adv_acc;
    for (const auto& [l, a] : adv_curve.points) {
        levels.push_back(l);
        adv_acc.push_back(a);
    }
    report.metrics["clean_accuracy"] = adv_curve.points.front().second;
    report.metrics["adversarial_level8_accuracy"] = adv_curve.points.back().second;
    report.metrics["gaussian_level8_accuracy"] = gau_curve.points.back().second;
    report.metrics["adversarial_final_over_initial"] =
        adv_curve.points.back().second / adv_curve.points.front().second;
    report.metrics["gaussian_final_over_initial"] =
        gau_curve.points.back().second / gau_curve.points.front().second;
    report.metrics["adversarial_spearman"] = spearman(levels, adv_acc);

    expdetail::finish_report(report, sw, out_dir);
    return report;
}

// ---------------------------------------------------------------------------
// Verification rejection: ASR of the five attack methods against positive
// pairs of a small identity set, plus the composed pre-transform condition.

inline ExperimentReport run_reject_verification(const RunConfig& cfg,
                                                const std::filesystem::path& out_dir) {
    expdetail::Stopwatch sw;
    std::filesystem::create_directories(out_dir);
    ExperimentReport report;
    expdetail::begin_report(report, "reject_verification", cfg);

    IdentitySetSpec ispec;
    ispec.identity_count = cfg.dataset.identity_count;
    ispec.images_per_identity = cfg.dataset.images_per_identity;
    ispec.seed = cfg.dataset.seed;
    if (ispec.identity_count < 20 || ispec.images_per_identity < 4)
        throw ConfigError("reject_verification needs >= 20 identities with >= 4 images each");
    const IdentitySet ids = generate_identities(ispec);
    report.dataset_hashes["identities_train"] = hash_hex(ids.train.content_hash());
    report.dataset_hashes["identities_test"] = hash_hex(ids.test.content_hash());

    std::string arch = cfg.model.architecture;
    // the identity head must match the identity count
    arch = arch.substr(0, arch.rfind(':') + 1) + std::to_string(ispec.identity_count);
    EmbeddingModel model = EmbeddingModel::train(ids.train, arch, cfg.train);

    // EER threshold calibration on clean training pairs
    const int train_per = (ispec.images_per_identity * 2) / 3;
    std::vector<Vec> train_emb;
    for (const auto& [img, y] : ids.train.items) train_emb.push_back(model.embed(img));
    std::vector<double> pos, neg;
    for (int id = 0; id < ispec.identity_count; ++id)
        for (int a = 0; a < train_per; ++a)
            for (int b = a + 1; b < train_per; ++b)
                pos.push_back(EmbeddingModel::cosine(train_emb[id * train_per + a],
                                                     train_emb[id * train_per + b]));
    for (int i = 0; i < ispec.identity_count; ++i)
        for (int j = i + 1; j < ispec.identity_count; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    neg.push_back(EmbeddingModel::cosine(train_emb[i * train_per + a],
                                                         train_emb[j * train_per + b]));
    model.set_match_threshold(EmbeddingModel::calibrate_eer_threshold(pos, neg));
    model.save(out_dir / "embedding_model.bin", cfg.train.seed);
    report.metrics["match_threshold"] = model.match_threshold();

    // positive pairs over the test split: (first image enrolled, others probe)
    const int test_per = ispec.images_per_identity - train_per;
    struct Pair {
        std::size_t enrolled, probe;
    };
    std::vector<Pair> pairs;
    for (int id = 0; id < ispec.identity_count; ++id)
        for (int a = 0; a < test_per; ++a)
            for (int b = a + 1; b < test_per; ++b)
                pairs.push_back({static_cast<std::size_t>(id * test_per + a),
                                 static_cast<std::size_t>(id * test_per + b)});
    report.metrics["positive_pairs"] = pairs.size();

    std::vector<Vec> enrolled_emb;
    enrolled_emb.reserve(pairs.size());
    long n_without = 0;
    for (const auto& p : pairs) {
        enrolled_emb.push_back(model.embed(ids.test.items[p.enrolled].first));
        if (EmbeddingModel::cosine(enrolled_emb.back(), model.embed(ids.test.items[p.probe].first)) >=
            model.match_threshold())
            ++n_without;
    }
    const long n_total = static_cast<long>(pairs.size());
    report.metrics["clean_verification_rate"] =
        static_cast<double>(n_without) / static_cast<double>(n_total);

    auto run_method = [&](const AttackConfig& acfg,
                          const ImageFilter* pre_transform) -> double {
        long n_with = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Image& probe = ids.test.items[pairs[i].probe].first;
            AttackConfig item_cfg = acfg;
            item_cfg.seed = derive_seed(cfg.experiment.seed, 0x766572ULL, i);
            auto obj = verification_objective(model, enrolled_emb[i]);
            Image adversarial =
                (pre_transform != nullptr)
                    ? compose_transform_then_attack(obj, probe, *pre_transform, item_cfg)
                          .attack_result.adversarial
                    : attack(obj, probe, item_cfg).adversarial;
            if (EmbeddingModel::cosine(enrolled_emb[i], model.embed(adversarial)) >=
                model.match_threshold())
                ++n_with;
        }
        return asr({n_without, n_with, n_total});
    };

    const std::vector<AttackMethod> methods = {AttackMethod::FGSM, AttackMethod::IFGSM,
                                               AttackMethod::MIFGSM, AttackMethod::DI2FGSM,
                                               AttackMethod::DMI2FGSM};
    json labels = json::array(), series = json::array();
    for (AttackMethod m : methods) {
        AttackConfig acfg = cfg.attack;
        acfg.method = m;
        acfg.targeted = false;
        acfg.iterations = (m == AttackMethod::FGSM) ? 1 : cfg.attack.iterations;
        const double v = run_method(acfg, nullptr);
        report.metrics["asr_" + method_name(m)] = v;
        labels.push_back(method_name(m));
        series.push_back(v);
    }
    report.tables["asr_by_method"] = {{"labels", labels}, {"series", {{"asr", series}}}};

    // zero-budget control
    AttackConfig zero = cfg.attack;
    zero.method = AttackMethod::FGSM;
    zero.iterations = 1;
    zero.epsilon = 0.0;
    report.metrics["asr_epsilon0"] = run_method(zero, nullptr);

    // composed condition: pre-transform alone vs pre-transform then FGSM
    {
        long n_with = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const Image filtered = makeup_proxy_filter(ids.test.items[pairs[i].probe].first);
            if (EmbeddingModel::cosine(enrolled_emb[i], model.embed(filtered)) >=
                model.match_threshold())
                ++n_with;
        }
        report.metrics["asr_pretransform_only"] = asr({n_without, n_with, n_total});
    }
    AttackConfig fgsm = cfg.attack;
    fgsm.method = AttackMethod::FGSM;
    fgsm.iterations = 1;
    ImageFilter filter = makeup_proxy_filter;
    report.metrics["asr_pretransform_then_FGSM"] = run_method(fgsm, &filter);

    expdetail::finish_report(report, sw, out_dir);
    return report;
}

// ---------------------------------------------------------------------------
// UAP probe: one UAP per class, held-out fooling rates and the blank-image
// prediction/confidence probe.

inline ExperimentReport run_uap_probe(const RunConfig& cfg,
                                      const std::filesystem::path& out_dir) {
    expdetail::Stopwatch sw;
    std::filesystem::create_directories(out_dir);
    ExperimentReport report;
    expdetail::begin_report(report, "uap_probe", cfg);

    const LabeledDataset train = expdetail::objects_train(cfg);
    const LabeledDataset test = expdetail::objects_test(cfg);
    report.dataset_hashes["train"] = hash_hex(train.content_hash());
    report.dataset_hashes["test"] = hash_hex(test.content_hash());

    Classifier model = Classifier::train(train, cfg.model.architecture, cfg.train);
    model.save(out_dir / "classifier.bin", cfg.train.seed);
    report.metrics["clean_test_accuracy"] = accuracy(model, test);

    const Shape shape = train.items.front().first.shape;
    Image blank(shape, 0.5f);
    json labels = json::array(), fool_series = json::array(), conf_series = json::array();
    int blank_hits = 0;
    double fool_sum = 0.0;
    for (int c = 0; c < train.class_count; ++c) {
        UniversalPerturbation uap =
            train_uap(model, train, c, cfg.experiment.uap_epsilon, cfg.experiment.uap_epochs,
                      cfg.experiment.uap_step_size, derive_seed(cfg.experiment.seed, 0x756170, c));
        uap.fooling_rate = fooling_rate(model, test, uap);
        uap.save(out_dir / ("uap_class_" + std::to_string(c) + ".bin"));
        const Image probe = apply_perturbation(blank, uap.delta);
        const int pred = model.predict(probe);
        const double conf = expdetail::round4(model.confidence(probe, c));
        const bool hit = (pred == c) && conf >= 0.99;
        if (hit) ++blank_hits;
        fool_sum += uap.fooling_rate;
        report.metrics["fooling_rate_class_" + std::to_string(c)] = uap.fooling_rate;
        report.metrics["blank_confidence_class_" + std::to_string(c)] = conf;
        labels.push_back(std::to_string(c));
        fool_series.push_back(uap.fooling_rate);
        conf_series.push_back(conf);
    }
    report.metrics["uap_count"] = train.class_count;
    report.metrics["mean_fooling_rate"] = fool_sum / train.class_count;
    report.metrics["blank_confident_classes"] = blank_hits;
    report.tables["uap_probe"] = {
        {"labels", labels},
        {"series", {{"fooling_rate", fool_series}, {"blank_confidence", conf_series}}}};

    expdetail::finish_report(report, sw, out_dir);
    return report;
}

// ---------------------------------------------------------------------------
// Non-robust generalization: train f_adv on adversarially relabeled images
// and evaluate on the clean test set, with the eps=0 randomized-label control.

inline ExperimentReport run_nonrobust_generalization(const RunConfig& cfg,
                                                     const std::filesystem::path& out_dir) {
    expdetail::Stopwatch sw;
    std::filesystem::create_directories(out_dir);
    ExperimentReport report;
    expdetail::begin_report(report, "nonrobust_generalization", cfg);

    const LabeledDataset d_ori = expdetail::objects_train(cfg);
    const LabeledDataset test = expdetail::objects_test(cfg);
    report.dataset_hashes["d_ori"] = hash_hex(d_ori.content_hash());
    report.dataset_hashes["test"] = hash_hex(test.content_hash());

    Classifier f_ori = Classifier::train(d_ori, cfg.model.architecture, cfg.train);
    f_ori.save(out_dir / "f_ori.bin", cfg.train.seed);
    report.metrics["f_ori_clean_accuracy"] = accuracy(f_ori, test);

    AttackConfig adv_cfg = cfg.attack;
    adv_cfg.targeted = true;
    adv_cfg.target = 0;  // per-item targets assigned inside build_adv_dataset
    AdvDataset d_adv = build_adv_dataset(d_ori, f_ori, adv_cfg, cfg.experiment.seed);
    save_dataset(d_adv.dataset, out_dir / "d_adv.bin");
    write_json(d_adv.manifest.to_json(), out_dir / "d_adv_manifest.json");
    report.dataset_hashes["d_adv"] = d_adv.manifest.result_hash;
    report.metrics["d_adv_targeted_success_rate"] = 1.0 - d_adv.manifest.attack_failure_rate;

    Classifier f_adv = Classifier::train(d_adv.dataset, cfg.model.architecture, cfg.train);
    f_adv.save(out_dir / "f_adv.bin", cfg.train.seed);
    report.metrics["f_adv_clean_accuracy"] = accuracy(f_adv, test);

    // eps = 0 control: unperturbed images, labels uniform over all classes.
    // Drawing targets from classes \ {y} at eps = 0 would plant an anti-signal
    // and push the control below chance; uniform relabeling sits at chance.
    LabeledDataset d_ctl = d_ori;
    for (std::size_t i = 0; i < d_ctl.items.size(); ++i) {
        Rng rng(derive_seed(cfg.experiment.seed, 0x63746cULL, i));
        d_ctl.items[i].second = uniform_int(rng, 0, d_ctl.class_count - 1);
    }
    Classifier f_ctl = Classifier::train(d_ctl, cfg.model.architecture, cfg.train);
    report.metrics["epsilon0_control_accuracy"] = accuracy(f_ctl, test);

    // full-scale paper context, not desk-scale targets
    report.metrics["reference_full_scale_f_ori"] = 0.944;
    report.metrics["reference_full_scale_f_adv"] = 0.663;

    expdetail::finish_report(report, sw, out_dir);
    return report;
}

// ---------------------------------------------------------------------------
// Adversarial augmentation: imbalance 4 reduced classes to 10%, augment each
// with targeted adversarial items from the other 6 classes, compare accuracy.

inline ExperimentReport run_adversarial_augmentation(const RunConfig& cfg,
                                                     const std::filesystem::path& out_dir) {
    expdetail::Stopwatch sw;
    std::filesystem::create_directories(out_dir);
    ExperimentReport report;
    expdetail::begin_report(report, "adversarial_augmentation", cfg);

    const LabeledDataset d_ori = expdetail::objects_train(cfg);
    const LabeledDataset test = expdetail::objects_test(cfg);
    report.dataset_hashes["d_ori"] = hash_hex(d_ori.content_hash());
    report.dataset_hashes["test"] = hash_hex(test.content_hash());

    const std::set<int> reduced = {6, 7, 8, 9};  // frog, horse, ship, truck in CIFAR-10 order
    const double fraction = 0.10;
    std::vector<int> ori_counts(d_ori.class_count, 0);
    for (const auto& [img, y] : d_ori.items) ++ori_counts[y];
    const int per_class_add =
        static_cast<int>(fraction * ori_counts[*reduced.begin()]);

    auto reduced_mean = [&](const std::vector<double>& per_class) {
        double s = 0.0;
        for (int c : reduced) s += per_class[c];
        return s / static_cast<double>(reduced.size());
    };

    std::vector<double> deltas, control_deltas;
    json labels = json::array();
    for (int c : reduced) labels.push_back(cfg.dataset.source == "cifar10"
                                               ? cifar10_class_names()[c]
                                               : ("class_" + std::to_string(c)));
    for (int trial = 0; trial < cfg.experiment.augmentation_trials; ++trial) {
        const std::uint64_t seed = derive_seed(cfg.experiment.seed, 0x747269ULL, trial);
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.train.seed, 0x747254ULL, trial);

        ImbalancedDataset d_imb = build_imbalanced(d_ori, reduced, fraction, seed);
        Classifier f_imb = Classifier::train(d_imb.dataset, cfg.model.architecture, tc);
        const auto acc_imb = per_class_accuracy(f_imb, test);

        // f_aug (and the control below) continue from the f_imb weights so the
        // delta isolates the effect of the added items from retraining noise.
        const std::filesystem::path snapshot = out_dir / "f_imb_snapshot.bin";
        f_imb.save(snapshot, tc.seed);
        TrainConfig ft = tc;
        ft.epochs = cfg.experiment.augmentation_finetune_epochs;

        AttackConfig aug_cfg = cfg.attack;
        aug_cfg.targeted = true;
        aug_cfg.target = 0;
        AugmentedDataset d_aug =
            build_augmented(d_imb.dataset, reduced, per_class_add, f_imb, aug_cfg, seed);
        Classifier f_aug = Classifier::load(snapshot);
        f_aug.fit(d_aug.dataset, ft);
        const auto acc_aug = per_class_accuracy(f_aug, test);

        const double delta = 100.0 * (reduced_mean(acc_aug) - reduced_mean(acc_imb));
        deltas.push_back(delta);
        report.metrics["trial" + std::to_string(trial) + "_f_imb_reduced_mean"] =
            reduced_mean(acc_imb);
        report.metrics["trial" + std::to_string(trial) + "_f_aug_reduced_mean"] =
            reduced_mean(acc_aug);
        report.metrics["trial" + std::to_string(trial) + "_delta_points"] = delta;

        if (trial == 0) {
            save_dataset(d_imb.dataset, out_dir / "d_imb.bin");
            write_json(d_imb.manifest.to_json(), out_dir / "d_imb_manifest.json");
            save_dataset(d_aug.dataset, out_dir / "d_aug.bin");
            write_json(d_aug.manifest.to_json(), out_dir / "d_aug_manifest.json");
            report.dataset_hashes["d_imb"] = d_imb.manifest.result_hash;
            report.dataset_hashes["d_aug"] = d_aug.manifest.result_hash;
            json imb_series = json::array(), aug_series = json::array();
            for (int c : reduced) {
                imb_series.push_back(acc_imb[c]);
                aug_series.push_back(acc_aug[c]);
            }
            report.tables["reduced_class_accuracy"] = {
                {"labels", labels}, {"series", {{"f_imb", imb_series}, {"f_aug", aug_series}}}};
        }

        // eps = 0 negative control: augmentation adds mislabeled clean images
        AttackConfig zero_cfg = aug_cfg;
        zero_cfg.method = AttackMethod::FGSM;
        zero_cfg.iterations = 1;
        zero_cfg.epsilon = 0.0;
        AugmentedDataset d_ctl =
            build_augmented(d_imb.dataset, reduced, per_class_add, f_imb, zero_cfg, seed);
        Classifier f_ctl = Classifier::load(snapshot);
        f_ctl.fit(d_ctl.dataset, ft);
        const double ctl_delta =
            100.0 * (reduced_mean(per_class_accuracy(f_ctl, test)) - reduced_mean(acc_imb));
        control_deltas.push_back(ctl_delta);
        report.metrics["trial" + std::to_string(trial) + "_epsilon0_delta_points"] = ctl_delta;
    }

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    report.metrics["median_delta_points"] = median(deltas);
    report.metrics["median_epsilon0_delta_points"] = median(control_deltas);
    report.metrics["reference_full_scale_delta_points"] = 5.2;

    expdetail::finish_report(report, sw, out_dir);
    return report;
}

// ---------------------------------------------------------------------------

inline ExperimentReport run_experiment(const RunConfig& cfg,
                                       const std::filesystem::path& out_dir) {
    const std::string& name = cfg.experiment.name;
    if (name == "turing_sensitivity") return run_turing_sensitivity(cfg, out_dir);
    if (name == "reject_verification") return run_reject_verification(cfg, out_dir);
    if (name == "uap_probe") return run_uap_probe(cfg, out_dir);
    if (name == "nonrobust_generalization") return run_nonrobust_generalization(cfg, out_dir);
    if (name == "adversarial_augmentation") return run_adversarial_augmentation(cfg, out_dir);
    throw ConfigError("unknown experiment: " + name);
}

// Profile-tuned defaults for each experiment.
inline RunConfig default_config(const std::string& experiment, const std::string& profile) {
    RunConfig cfg;
    cfg.experiment.name = experiment;
    cfg.experiment.profile = profile;
    const bool full = (profile == "full");
    if (!full && profile != "reduced") throw ConfigError("unknown profile: " + profile);
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment: " + experiment);
    if (experiment == "turing_sensitivity") {
        cfg.dataset.source = "alphabet";
        cfg.dataset.train_per_class = full ? 1000 : 200;
        cfg.dataset.test_per_class = full ? 200 : 40;
        cfg.model.architecture =
            "conv:8x3,relu,avgpool:2,conv:16x3,relu,avgpool:2,dense:64,relu,dense:26";
        cfg.train.epochs = full ? 6 : 10;
    } else if (experiment == "reject_verification") {
        cfg.dataset.source = "identities";
        cfg.dataset.identity_count = full ? 40 : 24;
        cfg.dataset.images_per_identity = full ? 16 : 13;
        cfg.model.architecture =
            "conv:16x3,relu,avgpool:2,conv:32x3,relu,avgpool:2,dense:64,relu,dense:24";
        cfg.train.epochs = 30;
        // iterative methods need enough steps to traverse the epsilon ball
        cfg.attack.method = AttackMethod::IFGSM;
        cfg.attack.iterations = 10;
    } else {
        cfg.dataset.source = "objects";
        cfg.dataset.train_per_class = full ? 1000 : 500;
        cfg.dataset.test_per_class = full ? 200 : 100;
        cfg.train.epochs = 10;
        if (experiment == "nonrobust_generalization" ||
            experiment == "adversarial_augmentation") {
            // stronger budget so targeted relabeling attacks land
            cfg.attack.method = AttackMethod::IFGSM;
            cfg.attack.epsilon = 16.0 / 255.0;
            cfg.attack.step_size = 2.0 / 255.0;
            cfg.attack.iterations = 20;
        }
        if (experiment == "adversarial_augmentation") {
            // per-trial deltas are a few points; the baseline needs full
            // convergence and the larger test split keeps them well measured
            cfg.train.epochs = 20;
            cfg.dataset.test_per_class = 200;
        }
    }
    return cfg;
}

}  // namespace advkit
