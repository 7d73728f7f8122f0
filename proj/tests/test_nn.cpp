#include <catch2/catch_amalgamated.hpp>

#include "advkit/classifier.hpp"
#include "advkit/nn.hpp"

using namespace advkit;

namespace {

LabeledDataset tiny_dataset(int per_class, Shape shape, int classes, std::uint64_t seed) {
    LabeledDataset ds;
    ds.class_count = classes;
    Rng rng(seed);
    for (int c = 0; c < classes; ++c)
        for (int i = 0; i < per_class; ++i) {
            Image img(shape);
            for (float& v : img.data) v = clamp01(0.2f + 0.6f * c / classes + uniform(rng, -0.1f, 0.1f));
            ds.items.emplace_back(std::move(img), c);
        }
    return ds;
}

}  // namespace

TEST_CASE("linear softmax input gradient matches analytic formula") {
    // one dense layer: gradient of CE wrt x is W^T (softmax(Wx + b) - onehot(y))
    Network net({1, 1, 4}, "dense:3");
    Rng rng(11);
    net.init(rng);
    Vec x(4);
    x << 0.2f, 0.8f, 0.5f, 0.1f;
    Tape tape;
    const Vec logits = net.forward(x, &tape);
    const int y = 1;
    const Vec gx = net.backward(tape, cross_entropy_grad(logits, y));

    Eigen::Map<const Mat> W(net.params().data(), 3, 4);
    Vec sm = softmax(logits);
    sm[y] -= 1.0f;
    const Vec expect = W.transpose() * sm;
    for (int i = 0; i < 4; ++i) REQUIRE(gx[i] == Catch::Approx(expect[i]).margin(1e-6));
}

TEST_CASE("input gradient matches central finite differences") {
    // conv + pool + dense on a 4x4 input (<= 64 pixels)
    Network net({4, 4, 1}, "conv:3x3,relu,avgpool:2,dense:5");
    Rng rng(3);
    net.init(rng);
    Vec x(16);
    for (int i = 0; i < 16; ++i) x[i] = uniform(rng, 0.1f, 0.9f);
    const int label = 2;

    Tape tape;
    Vec logits = net.forward(x, &tape);
    Vec gx = net.backward(tape, cross_entropy_grad(logits, label));

    const float h = 1e-3f;
    for (int i = 0; i < 16; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double lp = cross_entropy(net.forward(xp), label);
        const double lm = cross_entropy(net.forward(xm), label);
        const double fd = (lp - lm) / (2.0 * h);
        REQUIRE(std::abs(gx[i] - fd) <= 1e-3);
    }
}

TEST_CASE("parameter gradients match finite differences") {
    Network net({4, 4, 1}, "conv:2x3,relu,avgpool:2,dense:3");
    Rng rng(9);
    net.init(rng);
    Vec x(16);
    for (int i = 0; i < 16; ++i) x[i] = uniform(rng, 0.0f, 1.0f);
    const int label = 0;

    Tape tape;
    Vec logits = net.forward(x, &tape);
    std::vector<float> grads(net.param_count(), 0.0f);
    net.backward(tape, cross_entropy_grad(logits, label), grads.data());

    const float h = 1e-3f;
    // probe a spread of parameters rather than all of them
    for (std::size_t p = 0; p < net.param_count(); p += 7) {
        const float orig = net.params()[p];
        net.params()[p] = orig + h;
        const double lp = cross_entropy(net.forward(x), label);
        net.params()[p] = orig - h;
        const double lm = cross_entropy(net.forward(x), label);
        net.params()[p] = orig;
        const double fd = (lp - lm) / (2.0 * h);
        REQUIRE(std::abs(grads[p] - fd) <= 2e-3);
    }
}

TEST_CASE("gradient at a saturated minimum is near zero") {
    // push one logit far above the rest: softmax saturates, CE gradient -> 0
    Network net({1, 1, 2}, "dense:2");
    Rng rng(1);
    net.init(rng);
    auto& prm = net.params();  // W is 2x2, then b[2]
    prm[0] = 40.0f; prm[1] = 40.0f; prm[2] = -40.0f; prm[3] = -40.0f;
    prm[4] = 0.0f; prm[5] = 0.0f;
    Vec x(2);
    x << 1.0f, 1.0f;
    Tape tape;
    Vec logits = net.forward(x, &tape);
    Vec gx = net.backward(tape, cross_entropy_grad(logits, 0));
    REQUIRE(gx.norm() <= 1e-6);
}

TEST_CASE("logits are deterministic and shaped by class count") {
    auto ds = tiny_dataset(6, {6, 6, 1}, 3, 21);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 5;
    auto clf = Classifier::train(ds, "conv:4x3,relu,avgpool:2,dense:3", cfg);
    const Vec a = clf.logits(ds.items[0].first);
    const Vec b = clf.logits(ds.items[0].first);
    REQUIRE(a.size() == 3);
    REQUIRE(a == b);

    // x vs x with one pixel changed by 0 -> identical
    Image same = ds.items[0].first;
    same.at(0, 0, 0) += 0.0f;
    REQUIRE(clf.logits(same) == a);
}

TEST_CASE("training is reproducible given the seed") {
    auto ds = tiny_dataset(8, {6, 6, 1}, 2, 33);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 17;
    auto a = Classifier::train(ds, "conv:4x3,relu,avgpool:2,dense:2", cfg);
    auto b = Classifier::train(ds, "conv:4x3,relu,avgpool:2,dense:2", cfg);
    REQUIRE(a.network().params() == b.network().params());
}

TEST_CASE("single-class degenerate training predicts that class") {
    auto ds = tiny_dataset(10, {6, 6, 1}, 1, 2);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 0;
    auto clf = Classifier::train(ds, "dense:1", cfg);
    for (const auto& [img, y] : ds.items) REQUIRE(clf.predict(img) == 0);
}

TEST_CASE("train rejects empty datasets and bad labels") {
    LabeledDataset empty;
    empty.class_count = 2;
    TrainConfig cfg;
    REQUIRE_THROWS_AS(Classifier::train(empty, "dense:2", cfg), ConfigError);

    auto ds = tiny_dataset(2, {4, 4, 1}, 2, 1);
    ds.items[0].second = 5;
    REQUIRE_THROWS_AS(Classifier::train(ds, "dense:2", cfg), DataError);
}

TEST_CASE("logits rejects shape mismatch") {
    auto ds = tiny_dataset(4, {6, 6, 1}, 2, 3);
    TrainConfig cfg;
    cfg.epochs = 1;
    auto clf = Classifier::train(ds, "dense:2", cfg);
    REQUIRE_THROWS_AS(clf.logits(Image(5, 5, 1)), DataError);
}

TEST_CASE("model save/load round trip preserves predictions") {
    auto ds = tiny_dataset(6, {6, 6, 1}, 3, 8);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 9;
    auto clf = Classifier::train(ds, "conv:4x3,relu,avgpool:2,dense:3", cfg);
    const auto path = std::filesystem::temp_directory_path() / "advkit_model_test.bin";
    clf.save(path, cfg.seed);
    auto loaded = Classifier::load(path);
    for (const auto& [img, y] : ds.items) REQUIRE(loaded.logits(img) == clf.logits(img));
}
