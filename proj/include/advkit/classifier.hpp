#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/nn.hpp"
#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

struct TrainConfig {
    std::string optimizer = "adam";
    double learning_rate = 1e-3;
    int epochs = 10;
    int batch_size = 32;
    // Weight each sample's loss by N / (K * N_y) so every class contributes
    // equally regardless of its frequency in the training set.
    bool balanced_loss = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (optimizer != "adam") throw ConfigError("unsupported optimizer: " + optimizer);
        if (learning_rate <= 0) throw ConfigError("learning rate must be > 0");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    }
};

inline Vec to_vec(const Image& img) {
    return Eigen::Map<const Vec>(img.data.data(), static_cast<Eigen::Index>(img.data.size()));
}

inline Image to_image(const Vec& v, Shape shape) {
    Image img(shape);
    if (v.size() != static_cast<Eigen::Index>(shape.size()))
        throw DataError("to_image: size mismatch");
    std::copy(v.data(), v.data() + v.size(), img.data.begin());
    return img;
}

class Classifier {
public:
    Classifier() = default;
    Classifier(Shape input, const std::string& arch, int class_count)
        : net_(input, arch), class_count_(class_count) {
        if (net_.output_shape().size() != static_cast<std::size_t>(class_count))
            throw ConfigError("architecture output size " +
                              std::to_string(net_.output_shape().size()) +
                              " != class_count " + std::to_string(class_count));
    }

    static Classifier train(const LabeledDataset& dataset, const std::string& arch,
                            const TrainConfig& cfg) {
        cfg.validate();
        if (dataset.items.empty()) throw ConfigError("train: empty dataset");
        dataset.validate();
        Classifier clf(dataset.items.front().first.shape, arch, dataset.class_count);
        Rng rng(derive_seed(cfg.seed, 0x7261696e));
        clf.net_.init(rng);
        clf.fit(dataset, cfg);
        return clf;
    }

    // Continue training an already-initialized model (used by experiments that
    // fine-tune on derived data from the same initialization).
    void fit(const LabeledDataset& dataset, const TrainConfig& cfg) {
        cfg.validate();
        Adam opt(net_.param_count(), cfg.learning_rate);
        std::vector<float> class_weight(static_cast<std::size_t>(class_count_), 1.0f);
        if (cfg.balanced_loss) {
            std::vector<std::size_t> counts(static_cast<std::size_t>(class_count_), 0);
            for (const auto& [img, y] : dataset.items) ++counts[y];
            for (int c = 0; c < class_count_; ++c)
                if (counts[c] > 0)
                    class_weight[c] = static_cast<float>(dataset.items.size()) /
                                      (static_cast<float>(class_count_) *
                                       static_cast<float>(counts[c]));
        }
        std::vector<std::size_t> order(dataset.items.size());
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(derive_seed(cfg.seed, 0x73687566));
        std::vector<float> grads(net_.param_count());
        Tape tape;
        double last_loss = 0.0;
        for (int ep = 0; ep < cfg.epochs; ++ep) {
            std::shuffle(order.begin(), order.end(), shuffle_rng);
            double epoch_loss = 0.0;
            for (std::size_t i = 0; i < order.size(); i += cfg.batch_size) {
                const std::size_t end = std::min(order.size(), i + cfg.batch_size);
                std::fill(grads.begin(), grads.end(), 0.0f);
                for (std::size_t j = i; j < end; ++j) {
                    const auto& [img, y] = dataset.items[order[j]];
                    const float w = class_weight[y];
                    Vec logit = net_.forward(to_vec(img), &tape);
                    epoch_loss += w * cross_entropy(logit, y);
                    Vec g = cross_entropy_grad(logit, y) * (w / static_cast<float>(end - i));
                    net_.backward(tape, g, grads.data());
                }
                opt.step(net_.params(), grads);
            }
            last_loss = epoch_loss / static_cast<double>(order.size());
        }
        final_train_loss_ = last_loss;
    }

    Vec logits(const Image& x) const {
        if (!(x.shape == net_.input_shape()))
            throw DataError("logits: input shape " + x.shape.str() + " != model shape " +
                            net_.input_shape().str());
        return net_.forward(to_vec(x));
    }

    // Tie-break: lowest index among equal maximal logits.
    int predict(const Image& x) const {
        const Vec l = logits(x);
        int best = 0;
        for (int i = 1; i < class_count_; ++i)
            if (l[i] > l[best]) best = i;
        return best;
    }

    double confidence(const Image& x, int cls) const { return softmax(logits(x))[cls]; }

    // Gradient of cross_entropy(model(x), label) with respect to x.
    Image input_gradient(const Image& x, int label) const {
        if (label < 0 || label >= class_count_)
            throw DataError("input_gradient: label out of range");
        Tape tape;
        const Vec logit = net_.forward(to_vec(x), &tape);
        const Vec g = net_.backward(tape, cross_entropy_grad(logit, label));
        return to_image(g, x.shape);
    }

    const Network& network() const { return net_; }
    Network& network() { return net_; }
    int class_count() const { return class_count_; }
    Shape input_shape() const { return net_.input_shape(); }
    double final_train_loss() const { return final_train_loss_; }

    void save(const std::filesystem::path& blob_path, std::uint64_t seed = 0,
              const json& extra_metrics = json::object()) const {
        std::ofstream out(blob_path, std::ios::binary);
        if (!out) throw DataError("cannot open for write: " + blob_path.string());
        const char magic[4] = {'A', 'M', 'D', '1'};
        out.write(magic, 4);
        const std::uint64_t n = net_.param_count();
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(net_.params().data()),
                  static_cast<std::streamsize>(n * sizeof(float)));
        json side = {
            {"architecture", net_.descriptor()},
            {"input_shape", {net_.input_shape().h, net_.input_shape().w, net_.input_shape().c}},
            {"class_count", class_count_},
            {"seed", seed},
            {"param_count", n},
            {"final_train_loss", final_train_loss_},
            {"metrics", extra_metrics},
        };
        write_json(side, blob_path.string() + ".json");
    }

    static Classifier load(const std::filesystem::path& blob_path) {
        const json side = read_json(blob_path.string() + ".json");
        Shape in{side["input_shape"][0], side["input_shape"][1], side["input_shape"][2]};
        Classifier clf(in, side["architecture"].get<std::string>(), side["class_count"].get<int>());
        std::ifstream f(blob_path, std::ios::binary);
        if (!f) throw DataError("cannot open: " + blob_path.string());
        char magic[4];
        f.read(magic, 4);
        if (!f || std::string(magic, 4) != "AMD1") throw DataError("bad model magic");
        std::uint64_t n = 0;
        f.read(reinterpret_cast<char*>(&n), sizeof(n));
        if (n != clf.net_.param_count()) throw DataError("model parameter count mismatch");
        f.read(reinterpret_cast<char*>(clf.net_.params().data()),
               static_cast<std::streamsize>(n * sizeof(float)));
        if (!f) throw DataError("truncated model blob");
        clf.final_train_loss_ = side.value("final_train_loss", 0.0);
        return clf;
    }

private:
    Network net_;
    int class_count_ = 0;
    double final_train_loss_ = 0.0;
};

}  // namespace advkit
