#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "advkit/errors.hpp"

namespace advkit {

struct Shape {
    int h = 0;
    int w = 0;
    int c = 0;

    std::size_t size() const { return static_cast<std::size_t>(h) * w * c; }
    bool operator==(const Shape&) const = default;
    std::string str() const {
        return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
    }
};

// Image with values in [0,1]; layout is row-major (y, x, channel).
struct Image {
    Shape shape;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c, float fill = 0.0f)
        : shape{h, w, c}, data(static_cast<std::size_t>(h) * w * c, fill) {}
    explicit Image(Shape s, float fill = 0.0f)
        : shape(s), data(s.size(), fill) {}

    float& at(int y, int x, int ch) {
        return data[(static_cast<std::size_t>(y) * shape.w + x) * shape.c + ch];
    }
    float at(int y, int x, int ch) const {
        return data[(static_cast<std::size_t>(y) * shape.w + x) * shape.c + ch];
    }
    std::size_t size() const { return data.size(); }
};

inline float clamp01(float v) { return std::min(1.0f, std::max(0.0f, v)); }

inline void clamp01_inplace(Image& img) {
    for (float& v : img.data) v = clamp01(v);
}

inline float linf_dist(const Image& a, const Image& b) {
    if (a.shape != b.shape) throw DataError("linf_dist: shape mismatch");
    float m = 0.0f;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

// x + delta, clamped back into the valid pixel range.
inline Image apply_perturbation(const Image& x, const std::vector<float>& delta) {
    if (delta.size() != x.data.size()) throw DataError("apply_perturbation: shape mismatch");
    Image out = x;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = clamp01(out.data[i] + delta[i]);
    return out;
}

inline Image apply_perturbation(const Image& x, const Image& delta) {
    if (delta.shape != x.shape) throw DataError("apply_perturbation: shape mismatch");
    return apply_perturbation(x, delta.data);
}

// Elementwise clamp of candidate into [origin-eps, origin+eps] ∩ [0,1].
inline Image project_linf(const Image& candidate, const Image& origin, float epsilon) {
    if (candidate.shape != origin.shape) throw DataError("project_linf: shape mismatch");
    Image out = candidate;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const float lo = std::max(0.0f, origin.data[i] - epsilon);
        const float hi = std::min(1.0f, origin.data[i] + epsilon);
        out.data[i] = std::min(hi, std::max(lo, out.data[i]));
    }
    return out;
}

// FNV-1a over raw bytes; used as the content hash in manifests and reports.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t content_hash(const Image& img) {
    std::uint64_t h = fnv1a(&img.shape, sizeof(img.shape));
    return fnv1a(img.data.data(), img.data.size() * sizeof(float), h);
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace advkit
