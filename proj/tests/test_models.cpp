#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "advkit/datasets.hpp"
#include "advkit/embedding.hpp"

using namespace advkit;

namespace {

IdentitySet small_identities() {
    IdentitySetSpec spec;
    spec.identity_count = 6;
    spec.images_per_identity = 6;
    spec.seed = 11;
    return generate_identities(spec);
}

EmbeddingModel small_model(const IdentitySet& ids) {
    TrainConfig tc;
    tc.epochs = 8;
    tc.seed = 1;
    return EmbeddingModel::train(
        ids.train, "conv:8x3,relu,avgpool:2,conv:16x3,relu,avgpool:2,dense:32,relu,dense:6", tc);
}

}  // namespace

TEST_CASE("embeddings are unit norm") {
    const auto ids = small_identities();
    const auto model = small_model(ids);
    for (const auto& [img, y] : ids.test.items) {
        const Vec e = model.embed(img);
        REQUIRE(e.size() == model.embedding_dim());
        REQUIRE(e.norm() == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("cosine is symmetric and self-similarity is 1") {
    const auto ids = small_identities();
    const auto model = small_model(ids);
    const Vec a = model.embed(ids.test.items[0].first);
    const Vec b = model.embed(ids.test.items[1].first);
    REQUIRE(EmbeddingModel::cosine(a, b) == Catch::Approx(EmbeddingModel::cosine(b, a)));
    REQUIRE(EmbeddingModel::cosine(a, a) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("EER calibration on separable similarity samples") {
    std::vector<double> pos = {0.80, 0.83, 0.86, 0.90, 0.95};
    std::vector<double> neg = {0.05, 0.10, 0.15, 0.20, 0.25};
    const double th = EmbeddingModel::calibrate_eer_threshold(pos, neg);
    REQUIRE(th > 0.25);
    REQUIRE(th <= 0.80);
    // at the returned threshold FAR = FRR = 0
    for (double p : pos) REQUIRE(p >= th);
    for (double n : neg) REQUIRE(n < th);
    REQUIRE_THROWS_AS(EmbeddingModel::calibrate_eer_threshold({}, neg), ConfigError);
}

TEST_CASE("EER calibration balances overlapping distributions") {
    // 4 positives below 0.5, 4 negatives above: EER point has FAR ~= FRR
    std::vector<double> pos = {0.30, 0.40, 0.60, 0.70, 0.80, 0.90, 0.92, 0.95};
    std::vector<double> neg = {0.10, 0.20, 0.35, 0.45, 0.55, 0.65, 0.15, 0.25};
    const double th = EmbeddingModel::calibrate_eer_threshold(pos, neg);
    auto frr = [&](double t) {
        int n = 0;
        for (double p : pos) n += (p < t);
        return n / 8.0;
    };
    auto far = [&](double t) {
        int n = 0;
        for (double v : neg) n += (v >= t);
        return n / 8.0;
    };
    REQUIRE(std::abs(far(th) - frr(th)) <= 0.125 + 1e-12);  // within one sample step
}

TEST_CASE("cosine gradient matches central finite differences") {
    const auto ids = small_identities();
    TrainConfig tc;
    tc.epochs = 4;
    tc.seed = 2;
    // tiny net keeps the finite-difference sweep cheap
    IdentitySetSpec spec;
    spec.identity_count = 3;
    spec.images_per_identity = 4;
    spec.seed = 21;
    const auto small_ids = generate_identities(spec);
    const auto model =
        EmbeddingModel::train(small_ids.train, "avgpool:4,dense:8,relu,dense:3", tc);
    const Image& x = small_ids.test.items[0].first;
    const Vec ref = model.embed(small_ids.test.items[1].first);
    const Image g = model.cosine_gradient(x, ref);
    const float h = 5e-3f;
    double max_err = 0.0;
    for (std::size_t i = 0; i < x.data.size(); i += 97) {  // sample of coordinates
        Image xp = x, xm = x;
        xp.data[i] += h;
        xm.data[i] -= h;
        const double fd =
            (EmbeddingModel::cosine(model.embed(xp), ref) -
             EmbeddingModel::cosine(model.embed(xm), ref)) /
            (2.0 * h);
        max_err = std::max(max_err, std::abs(fd - g.data[i]));
    }
    REQUIRE(max_err < 1e-3);
}

TEST_CASE("embedding model save/load preserves threshold and embeddings") {
    const auto ids = small_identities();
    auto model = small_model(ids);
    model.set_match_threshold(0.8125);
    const auto path = std::filesystem::temp_directory_path() / "advkit_embed_test.bin";
    model.save(path, 1);
    const auto loaded = EmbeddingModel::load(path);
    REQUIRE(loaded.match_threshold() == 0.8125);
    const Vec a = model.embed(ids.test.items[0].first);
    const Vec b = loaded.embed(ids.test.items[0].first);
    REQUIRE(a.size() == b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("verify applies the calibrated threshold") {
    const auto ids = small_identities();
    auto model = small_model(ids);
    model.set_match_threshold(-1.0);  // everything matches
    REQUIRE(model.verify(ids.test.items[0].first, ids.test.items[1].first));
    model.set_match_threshold(1.5);  // nothing matches
    REQUIRE_FALSE(model.verify(ids.test.items[0].first, ids.test.items[0].first));
}
