#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "advkit/distortions.hpp"
#include "advkit/metrics.hpp"

using namespace advkit;

namespace {

LabeledDataset two_tone(int per_class, std::uint64_t seed) {
    LabeledDataset ds;
    ds.class_count = 2;
    Rng rng(seed);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < per_class; ++i) {
            Image img(8, 8, 1);
            for (float& v : img.data)
                v = clamp01(0.2f + 0.6f * c + uniform(rng, -0.1f, 0.1f));
            ds.items.emplace_back(std::move(img), c);
        }
    return ds;
}

}  // namespace

TEST_CASE("level 0 is the identity for both kinds") {
    auto ds = two_tone(4, 1);
    TrainConfig tc;
    tc.epochs = 2;
    auto model = Classifier::train(ds, "dense:2", tc);
    DistortionSchedule sched;
    for (auto kind : {DistortionKind::adversarial, DistortionKind::gaussian}) {
        sched.kind = kind;
        const Image out = distort(ds.items[0].first, &model, sched, 0, 0, 0);
        REQUIRE(out.data == ds.items[0].first.data);
    }
}

TEST_CASE("adversarial level k moves at most k*steps*step in L-inf") {
    auto ds = two_tone(6, 2);
    TrainConfig tc;
    tc.epochs = 3;
    auto model = Classifier::train(ds, "conv:4x3,relu,avgpool:2,dense:2", tc);
    DistortionSchedule sched;
    sched.kind = DistortionKind::adversarial;
    const Image& x = ds.items[1].first;
    for (int lvl : {1, 2, 4}) {
        const Image out = distort(x, &model, sched, lvl, ds.items[1].second, 0);
        REQUIRE(linf_dist(out, x) <=
                lvl * sched.steps_per_level * sched.adversarial_step + 1e-6);
    }
}

TEST_CASE("gaussian distortion never touches the model") {
    auto ds = two_tone(2, 3);
    DistortionSchedule sched;
    sched.kind = DistortionKind::gaussian;
    // nullptr model: would crash or throw if the gaussian path consulted it
    const Image out = distort(ds.items[0].first, nullptr, sched, 3, -1, 5);
    REQUIRE(out.shape == ds.items[0].first.shape);
    const auto sets = build_distorted_testset(ds, nullptr, sched);
    REQUIRE(sets.size() == 9u);  // levels 0..8
}

TEST_CASE("adversarial distortion without a model is rejected") {
    auto ds = two_tone(2, 4);
    DistortionSchedule sched;
    sched.kind = DistortionKind::adversarial;
    REQUIRE_THROWS_AS(distort(ds.items[0].first, nullptr, sched, 1, 0, 0), ConfigError);
    REQUIRE_THROWS_AS(distort(ds.items[0].first, nullptr, sched, 9, 0, 0), ConfigError);
}

TEST_CASE("gaussian level k extends level k-1's stream exactly") {
    auto ds = two_tone(3, 5);
    DistortionSchedule sched;
    sched.kind = DistortionKind::gaussian;
    sched.seed = 17;
    const auto sets = build_distorted_testset(ds, nullptr, sched);
    for (std::size_t i = 0; i < ds.items.size(); ++i)
        for (int lvl = 0; lvl <= sched.levels; ++lvl) {
            const Image direct = distort(ds.items[i].first, nullptr, sched, lvl, -1, i);
            REQUIRE(direct.data == sets.at(lvl).items[i].first.data);
        }
}

TEST_CASE("one gaussian step has the configured pre-clamp statistics") {
    DistortionSchedule sched;
    sched.kind = DistortionKind::gaussian;
    sched.steps_per_level = 1;
    sched.gaussian_variance = 0.01;
    Image x(32, 32, 3, 0.5f);  // far from the clamp boundaries
    LabeledDataset ds;
    ds.class_count = 1;
    ds.items.emplace_back(x, 0);
    const Image noisy = distort(x, nullptr, sched, 1, -1, 0);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double d = noisy.data[i] - x.data[i];
        sum += d;
        sq += d * d;
    }
    const double n = static_cast<double>(x.data.size());
    const double mean = sum / n;
    const double stddev = std::sqrt(sq / n - mean * mean);
    REQUIRE(std::abs(mean) < 0.01);          // 3072 samples, sigma/sqrt(n) ~ 0.0018
    REQUIRE(stddev == Catch::Approx(0.1).margin(0.01));
}

TEST_CASE("distorted sets preserve labels, counts and determinism") {
    auto ds = two_tone(5, 6);
    DistortionSchedule sched;
    sched.kind = DistortionKind::gaussian;
    sched.seed = 23;
    const auto a = build_distorted_testset(ds, nullptr, sched);
    const auto b = build_distorted_testset(ds, nullptr, sched);
    for (int lvl = 0; lvl <= sched.levels; ++lvl) {
        REQUIRE(a.at(lvl).items.size() == ds.items.size());
        REQUIRE(a.at(lvl).content_hash() == b.at(lvl).content_hash());
        for (std::size_t i = 0; i < ds.items.size(); ++i)
            REQUIRE(a.at(lvl).items[i].second == ds.items[i].second);
    }
    sched.seed = 24;
    const auto c = build_distorted_testset(ds, nullptr, sched);
    REQUIRE(a.at(1).content_hash() != c.at(1).content_hash());
}

TEST_CASE("schedule validation") {
    DistortionSchedule sched;
    sched.levels = 0;
    REQUIRE_THROWS_AS(sched.validate(), ConfigError);
    sched = DistortionSchedule{};
    sched.gaussian_variance = 0.0;
    REQUIRE_THROWS_AS(sched.validate(), ConfigError);
    sched = DistortionSchedule{};
    sched.adversarial_step = -0.1;
    REQUIRE_THROWS_AS(sched.validate(), ConfigError);
}
