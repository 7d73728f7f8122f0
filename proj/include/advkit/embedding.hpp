#pragma once

// Embedding model for verification: a classifier over identities whose
// penultimate activation, L2-normalized, is the embedding. The match
// threshold is calibrated to the equal-error-rate point on clean pairs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/nn.hpp"

namespace advkit {

class EmbeddingModel {
public:
    EmbeddingModel() = default;

    // Train a classifier over identity labels; embeddings come from the
    // output of layer `embed_layer` (default: the layer feeding the final
    // dense head, i.e. layer_count - 2).
    static EmbeddingModel train(const LabeledDataset& identities, const std::string& arch,
                                const TrainConfig& cfg) {
        EmbeddingModel m;
        m.clf_ = Classifier::train(identities, arch, cfg);
        m.embed_layer_ = m.clf_.network().layer_count() - 2;
        m.embedding_dim_ =
            static_cast<int>(m.clf_.network().layer_output_shape(m.embed_layer_).size());
        return m;
    }

    int embedding_dim() const { return embedding_dim_; }
    double match_threshold() const { return threshold_; }
    void set_match_threshold(double t) { threshold_ = t; }
    Shape input_shape() const { return clf_.input_shape(); }
    const Classifier& classifier() const { return clf_; }

    Vec embed(const Image& x) const {
        Tape tape;
        clf_.network().forward(to_vec(x), &tape);
        Vec e = tape.acts[embed_layer_ + 1];
        const float n = e.norm();
        if (n > 0.0f) e /= n;
        return e;
    }

    static double cosine(const Vec& a, const Vec& b) { return a.dot(b); }

    bool verify(const Image& enrolled, const Image& probe) const {
        return cosine(embed(enrolled), embed(probe)) >= threshold_;
    }

    // Gradient of cosine(embed(x), reference) with respect to x, for a fixed
    // unit-norm reference embedding.
    Image cosine_gradient(const Image& x, const Vec& reference) const {
        Tape tape;
        clf_.network().forward(to_vec(x), &tape);
        Vec f = tape.acts[embed_layer_ + 1];  // pre-normalization feature
        const float n = f.norm();
        if (n <= 0.0f) return Image(x.shape, 0.0f);
        // d cos / d f  for  cos = (f/|f|)·r:  r/|f| - (f·r) f / |f|^3
        const float fr = f.dot(reference);
        Vec gf = reference / n - (fr / (n * n * n)) * f;
        Vec gx = clf_.network().backward(tape, gf, nullptr, embed_layer_);
        return to_image(gx, x.shape);
    }

    // Equal-error-rate calibration over labeled similarity samples.
    // pos/neg: cosine similarities of positive and negative pairs.
    static double calibrate_eer_threshold(std::vector<double> pos, std::vector<double> neg) {
        if (pos.empty() || neg.empty()) throw ConfigError("calibrate: empty pair sets");
        std::sort(pos.begin(), pos.end());
        std::sort(neg.begin(), neg.end());
        double best_th = 0.0, best_gap = 2.0;
        // candidate thresholds: all observed similarities
        std::vector<double> cands = pos;
        cands.insert(cands.end(), neg.begin(), neg.end());
        std::sort(cands.begin(), cands.end());
        for (double th : cands) {
            const double frr =
                static_cast<double>(std::lower_bound(pos.begin(), pos.end(), th) - pos.begin()) /
                static_cast<double>(pos.size());
            const double far =
                static_cast<double>(neg.end() - std::lower_bound(neg.begin(), neg.end(), th)) /
                static_cast<double>(neg.size());
            const double gap = std::abs(far - frr);
            if (gap < best_gap) {
                best_gap = gap;
                best_th = th;
            }
        }
        return best_th;
    }

    void save(const std::filesystem::path& blob_path, std::uint64_t seed = 0) const {
        clf_.save(blob_path, seed,
                  json{{"embedding_dim", embedding_dim_}, {"match_threshold", threshold_}});
        json side = read_json(blob_path.string() + ".json");
        side["kind"] = "embedding";
        write_json(side, blob_path.string() + ".json");
    }

    static EmbeddingModel load(const std::filesystem::path& blob_path) {
        EmbeddingModel m;
        m.clf_ = Classifier::load(blob_path);
        const json side = read_json(blob_path.string() + ".json");
        m.embed_layer_ = m.clf_.network().layer_count() - 2;
        m.embedding_dim_ =
            static_cast<int>(m.clf_.network().layer_output_shape(m.embed_layer_).size());
        m.threshold_ = side["metrics"].value("match_threshold", 0.0);
        return m;
    }

private:
    Classifier clf_;
    std::size_t embed_layer_ = 0;
    int embedding_dim_ = 0;
    double threshold_ = 0.0;
};

}  // namespace advkit
