#include <catch2/catch_amalgamated.hpp>

#include "advkit/classifier.hpp"
#include "advkit/metrics.hpp"

using namespace advkit;

TEST_CASE("asr trivial cases") {
    REQUIRE(asr({10, 10, 20}) == 0.0);
    REQUIRE(asr({20, 0, 20}) == 1.0);
    // perturbation that helps is reported as-is (negative)
    REQUIRE(asr({5, 9, 20}) == Catch::Approx(-0.2));
}

TEST_CASE("asr reproduces the recount oracle on an exhaustive grid") {
    // brute-force oracle: materialize per-item correctness flags and recount
    for (long total = 1; total <= 50; ++total)
        for (long nwo = 0; nwo <= total; ++nwo)
            for (long nw = 0; nw <= total; ++nw) {
                std::vector<int> without(total, 0), with(total, 0);
                for (long i = 0; i < nwo; ++i) without[i] = 1;
                for (long i = 0; i < nw; ++i) with[i] = 1;
                long rw = 0, rwo = 0;
                for (int v : without) rwo += v;
                for (int v : with) rw += v;
                const double expect = static_cast<double>(rwo - rw) / static_cast<double>(total);
                REQUIRE(asr({nwo, nw, total}) == expect);
            }
}

TEST_CASE("asr rejects empty totals") {
    REQUIRE_THROWS_AS(asr({0, 0, 0}), DataError);
}

TEST_CASE("asr is linear in N_w with slope -1/N_total") {
    const long total = 37, nwo = 30;
    const double base = asr({nwo, 0, total});
    for (long nw = 1; nw <= total; ++nw)
        REQUIRE(asr({nwo, nw, total}) ==
                Catch::Approx(base - static_cast<double>(nw) / total).margin(1e-12));
}

namespace {

LabeledDataset shaded_dataset(int per_class, int classes, std::uint64_t seed) {
    LabeledDataset ds;
    ds.class_count = classes;
    Rng rng(seed);
    for (int c = 0; c < classes; ++c)
        for (int i = 0; i < per_class; ++i) {
            Image img(6, 6, 1);
            for (float& v : img.data)
                v = clamp01(static_cast<float>(c) / classes + uniform(rng, 0.0f, 0.2f));
            ds.items.emplace_back(std::move(img), c);
        }
    return ds;
}

}  // namespace

TEST_CASE("accuracy is 1.0 against the model's own argmax labels") {
    auto ds = shaded_dataset(5, 3, 4);
    TrainConfig cfg;
    cfg.epochs = 2;
    auto clf = Classifier::train(ds, "dense:3", cfg);
    LabeledDataset self = ds;
    for (auto& [img, y] : self.items) y = clf.predict(img);
    REQUIRE(accuracy(clf, self) == 1.0);
}

TEST_CASE("accuracy is permutation invariant") {
    auto ds = shaded_dataset(6, 3, 12);
    TrainConfig cfg;
    cfg.epochs = 3;
    auto clf = Classifier::train(ds, "dense:3", cfg);
    const double a = accuracy(clf, ds);
    std::reverse(ds.items.begin(), ds.items.end());
    REQUIRE(accuracy(clf, ds) == a);
    REQUIRE_THROWS_AS(accuracy(clf, LabeledDataset{}), DataError);
}

TEST_CASE("sensitivity_curve degenerate single-level map") {
    auto ds = shaded_dataset(4, 2, 9);
    TrainConfig cfg;
    cfg.epochs = 2;
    auto clf = Classifier::train(ds, "dense:2", cfg);
    std::map<int, LabeledDataset> sets;
    sets[0] = ds;
    auto curve = sensitivity_curve(clf, sets, "gaussian");
    REQUIRE(curve.points.size() == 1);
    REQUIRE(curve.points[0].first == 0);
    REQUIRE(curve.points[0].second == accuracy(clf, ds));

    std::map<int, LabeledDataset> missing;
    missing[1] = ds;
    REQUIRE_THROWS_AS(sensitivity_curve(clf, missing, "gaussian"), ConfigError);
}

TEST_CASE("sensitivity curve serializes losslessly") {
    SensitivityCurve c;
    c.kind = "adversarial";
    c.points = {{0, 0.97}, {1, 0.5}, {2, 0.03125}};
    const auto rt = SensitivityCurve::from_json(c.to_json());
    REQUIRE(rt.kind == c.kind);
    REQUIRE(rt.points == c.points);
}

TEST_CASE("spearman handles monotone and tied sequences") {
    REQUIRE(spearman({0, 1, 2, 3}, {5, 4, 3, 2}) == Catch::Approx(-1.0));
    REQUIRE(spearman({0, 1, 2, 3}, {2, 3, 4, 5}) == Catch::Approx(1.0));
    // decreasing then exact ties at the floor
    const double r = spearman({0, 1, 2, 3, 4, 5, 6, 7, 8},
                              {0.9, 0.5, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0});
    REQUIRE(r == Catch::Approx(-0.9128709292).margin(1e-6));
}
