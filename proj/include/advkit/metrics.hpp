#pragma once

// Accuracy, attack success rate, and level/accuracy sensitivity curves.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "advkit/classifier.hpp"
#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"

namespace advkit {

struct AsrInputs {
    long n_without = 0;  // correctly recognized without perturbation
    long n_with = 0;     // correctly recognized with perturbation
    long n_total = 0;
};

// ASR = (N_w/o - N_w) / N_total; negative values are reported as-is.
inline double asr(const AsrInputs& in) {
    if (in.n_total <= 0) throw DataError("asr: N_total must be > 0");
    if (in.n_without < 0 || in.n_without > in.n_total || in.n_with < 0 ||
        in.n_with > in.n_total)
        throw DataError("asr: counts out of range");
    return static_cast<double>(in.n_without - in.n_with) / static_cast<double>(in.n_total);
}

inline double accuracy(const Classifier& model, const LabeledDataset& dataset) {
    if (dataset.items.empty()) throw DataError("accuracy: empty dataset");
    std::size_t correct = 0;
    for (const auto& [img, y] : dataset.items)
        if (model.predict(img) == y) ++correct;
    return static_cast<double>(correct) / static_cast<double>(dataset.items.size());
}

// Per-class accuracy; classes with no test items get -1.
inline std::vector<double> per_class_accuracy(const Classifier& model,
                                              const LabeledDataset& dataset) {
    std::vector<long> correct(dataset.class_count, 0), total(dataset.class_count, 0);
    for (const auto& [img, y] : dataset.items) {
        ++total[y];
        if (model.predict(img) == y) ++correct[y];
    }
    std::vector<double> acc(dataset.class_count, -1.0);
    for (int c = 0; c < dataset.class_count; ++c)
        if (total[c] > 0) acc[c] = static_cast<double>(correct[c]) / total[c];
    return acc;
}

struct SensitivityCurve {
    std::string kind;  // "adversarial" | "gaussian"
    std::vector<std::pair<int, double>> points;  // (level, accuracy), level-ascending

    json to_json() const {
        json pts = json::array();
        for (const auto& [lvl, acc] : points) pts.push_back({{"level", lvl}, {"accuracy", acc}});
        return {{"kind", kind}, {"points", pts}};
    }

    static SensitivityCurve from_json(const json& j) {
        SensitivityCurve c;
        c.kind = j.at("kind").get<std::string>();
        for (const auto& p : j.at("points"))
            c.points.emplace_back(p.at("level").get<int>(), p.at("accuracy").get<double>());
        return c;
    }
};

inline SensitivityCurve sensitivity_curve(const Classifier& model,
                                          const std::map<int, LabeledDataset>& distorted_sets,
                                          const std::string& kind) {
    if (distorted_sets.find(0) == distorted_sets.end())
        throw ConfigError("sensitivity_curve: level 0 missing");
    SensitivityCurve curve;
    curve.kind = kind;
    for (const auto& [lvl, ds] : distorted_sets)  // std::map iterates level-ascending
        curve.points.emplace_back(lvl, accuracy(model, ds));
    return curve;
}

// Spearman rank correlation with tie-averaged ranks.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw DataError("spearman: bad inputs");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace advkit
