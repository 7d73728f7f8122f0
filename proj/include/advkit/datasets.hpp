#pragma once

// Dataset construction: the synthetic alphabet CAPTCHA set, CIFAR-10 binary
// ingestion, and the procedural 10-class / multi-identity sets used for
// desk-scale runs.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "advkit/dataset.hpp"
#include "advkit/errors.hpp"
#include "advkit/rng.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

// ---------------------------------------------------------------------------
// Alphabet CAPTCHA set: 8x8 bitmap glyphs rasterized with placement jitter
// and a uniform-noise background.

namespace glyphs {

// 8 rows per letter, '#' = ink. Bundled so rendering has no external inputs.
inline const std::array<std::array<const char*, 8>, 26>& table() {
    static const std::array<std::array<const char*, 8>, 26> t = {{
        {"..##....", ".####...", "##..##..", "##..##..", "######..", "##..##..", "##..##..", "........"},  // A
        {"#####...", "##..##..", "##..##..", "#####...", "##..##..", "##..##..", "#####...", "........"},  // B
        {".####...", "##..##..", "##......", "##......", "##......", "##..##..", ".####...", "........"},  // C
        {"####....", "##.##...", "##..##..", "##..##..", "##..##..", "##.##...", "####....", "........"},  // D
        {"######..", "##......", "##......", "#####...", "##......", "##......", "######..", "........"},  // E
        {"######..", "##......", "##......", "#####...", "##......", "##......", "##......", "........"},  // F
        {".####...", "##..##..", "##......", "##.###..", "##..##..", "##..##..", ".#####..", "........"},  // G
        {"##..##..", "##..##..", "##..##..", "######..", "##..##..", "##..##..", "##..##..", "........"},  // H
        {"######..", "..##....", "..##....", "..##....", "..##....", "..##....", "######..", "........"},  // I
        {"..####..", "....##..", "....##..", "....##..", "##..##..", "##..##..", ".####...", "........"},  // J
        {"##..##..", "##.##...", "####....", "###.....", "####....", "##.##...", "##..##..", "........"},  // K
        {"##......", "##......", "##......", "##......", "##......", "##......", "######..", "........"},  // L
        {"##...##.", "###.###.", "#######.", "##.#.##.", "##...##.", "##...##.", "##...##.", "........"},  // M
        {"##..##..", "###.##..", "######..", "##.###..", "##..##..", "##..##..", "##..##..", "........"},  // N
        {".####...", "##..##..", "##..##..", "##..##..", "##..##..", "##..##..", ".####...", "........"},  // O
        {"#####...", "##..##..", "##..##..", "#####...", "##......", "##......", "##......", "........"},  // P
        {".####...", "##..##..", "##..##..", "##..##..", "##.###..", "##..##..", ".#####..", "........"},  // Q
        {"#####...", "##..##..", "##..##..", "#####...", "####....", "##.##...", "##..##..", "........"},  // R
        {".#####..", "##......", "##......", ".####...", "....##..", "....##..", "#####...", "........"},  // S
        {"######..", "..##....", "..##....", "..##....", "..##....", "..##....", "..##....", "........"},  // T
        {"##..##..", "##..##..", "##..##..", "##..##..", "##..##..", "##..##..", ".####...", "........"},  // U
        {"##..##..", "##..##..", "##..##..", "##..##..", "##..##..", ".####...", "..##....", "........"},  // V
        {"##...##.", "##...##.", "##...##.", "##.#.##.", "#######.", "###.###.", "##...##.", "........"},  // W
        {"##..##..", "##..##..", ".####...", "..##....", ".####...", "##..##..", "##..##..", "........"},  // X
        {"##..##..", "##..##..", ".####...", "..##....", "..##....", "..##....", "..##....", "........"},  // Y
        {"######..", "....##..", "...##...", "..##....", ".##.....", "##......", "######..", "........"},  // Z
    }};
    return t;
}

}  // namespace glyphs

struct AlphabetSpec {
    static constexpr int class_count = 26;
    int train_per_class = 1000;
    int test_per_class = 200;
    int image_side = 28;
    float noise_amplitude = 0.3f;
    std::uint64_t seed = 0;

    void validate() const {
        if (train_per_class < 1 || test_per_class < 1)
            throw ConfigError("alphabet: per-class counts must be >= 1");
        if (image_side < 12) throw ConfigError("alphabet: image side too small");
        if (noise_amplitude < 0.0f || noise_amplitude > 1.0f)
            throw ConfigError("alphabet: noise amplitude must be in [0,1]");
    }
};

// One glyph render; per-item rng keeps every image reproducible in isolation.
inline Image render_letter(int letter_index, const AlphabetSpec& spec, Rng& rng) {
    const auto& g = glyphs::table()[letter_index];
    const int side = spec.image_side;
    Image img(side, side, 1, 0.0f);
    const float max_scale = side / 8.0f;
    const float scale = uniform(rng, max_scale * 0.75f, max_scale * 0.93f);
    const float ox = uniform(rng, 0.0f, side - 8.0f * scale);
    const float oy = uniform(rng, 0.0f, side - 8.0f * scale);
    const float ink = uniform(rng, 0.8f, 1.0f);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const int gx = static_cast<int>((x - ox) / scale);
            const int gy = static_cast<int>((y - oy) / scale);
            float v = 0.0f;
            if (gx >= 0 && gx < 8 && gy >= 0 && gy < 8 && g[gy][gx] == '#') v = ink;
            const float noise = uniform(rng, 0.0f, spec.noise_amplitude);
            img.at(y, x, 0) = clamp01(std::max(v, noise));
        }
    return img;
}

inline LabeledDataset generate_alphabet_split(const AlphabetSpec& spec, Split split) {
    spec.validate();
    const int per_class = (split == Split::train) ? spec.train_per_class : spec.test_per_class;
    const std::uint64_t split_tag = (split == Split::train) ? 0x7472 : 0x7465;
    LabeledDataset ds;
    ds.class_count = AlphabetSpec::class_count;
    ds.split = split;
    ds.items.reserve(static_cast<std::size_t>(per_class) * AlphabetSpec::class_count);
    for (int cls = 0; cls < AlphabetSpec::class_count; ++cls)
        for (int i = 0; i < per_class; ++i) {
            Rng rng(derive_seed(derive_seed(spec.seed, split_tag), (cls << 20) | i));
            ds.items.emplace_back(render_letter(cls, spec, rng), cls);
        }
    return ds;
}

struct AlphabetDataset {
    LabeledDataset train;
    LabeledDataset test;
};

inline AlphabetDataset generate_alphabet(const AlphabetSpec& spec) {
    return {generate_alphabet_split(spec, Split::train),
            generate_alphabet_split(spec, Split::test)};
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary ingestion (data_batch_1..5.bin + test_batch.bin).

namespace detail {

inline void read_cifar_file(const std::filesystem::path& file, LabeledDataset& ds,
                            std::size_t expected_records) {
    constexpr std::size_t record = 1 + 3072;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("CIFAR-10 file missing: " + file.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size != expected_records * record)
        throw DataError("CIFAR-10 file has wrong size: " + file.string() + " (" +
                        std::to_string(size) + " bytes)");
    in.seekg(0);
    std::vector<unsigned char> buf(record);
    for (std::size_t i = 0; i < expected_records; ++i) {
        in.read(reinterpret_cast<char*>(buf.data()), record);
        if (!in) throw DataError("truncated CIFAR-10 file: " + file.string());
        const int label = buf[0];
        if (label < 0 || label > 9) throw DataError("CIFAR-10 label out of range");
        Image img(32, 32, 3);
        // stored channel-planar (R plane, G plane, B plane), row-major
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x)
                    img.at(y, x, c) = buf[1 + c * 1024 + y * 32 + x] / 255.0f;
        ds.items.emplace_back(std::move(img), label);
    }
}

}  // namespace detail

struct Cifar10 {
    LabeledDataset train;
    LabeledDataset test;
};

inline Cifar10 load_cifar10(const std::filesystem::path& dir) {
    Cifar10 out;
    out.train.class_count = 10;
    out.train.split = Split::train;
    out.test.class_count = 10;
    out.test.split = Split::test;
    // load into temporaries so a failure never yields a partial dataset
    LabeledDataset train_tmp = out.train, test_tmp = out.test;
    for (int b = 1; b <= 5; ++b)
        detail::read_cifar_file(dir / ("data_batch_" + std::to_string(b) + ".bin"), train_tmp,
                                10000);
    detail::read_cifar_file(dir / "test_batch.bin", test_tmp, 10000);
    out.train = std::move(train_tmp);
    out.test = std::move(test_tmp);
    return out;
}

inline const std::array<const char*, 10>& cifar10_class_names() {
    static const std::array<const char*, 10> names = {
        "airplane", "automobile", "bird", "cat",  "deer",
        "dog",      "frog",       "horse", "ship", "truck"};
    return names;
}

// ---------------------------------------------------------------------------
// Procedural 10-class object set: desk-scale stand-in with CIFAR-10 geometry
// (32x32x3, 10 classes). Class signal is an oriented grating; nuisances are
// phase, frequency, contrast, brightness and pixel noise.

struct SyntheticObjectsSpec {
    int train_per_class = 500;
    int test_per_class = 100;
    std::uint64_t seed = 0;
};

inline Image make_object_image(int cls, Rng& rng) {
    constexpr int side = 32;
    Image img(side, side, 3);
    const float theta = cls * 3.14159265f / 10.0f + gaussian(rng, 0.0f, 0.10f);
    const float freq = 0.30f + 0.05f * (cls % 3) + gaussian(rng, 0.0f, 0.03f);
    const float phase = uniform(rng, 0.0f, 6.2831853f);
    const float ct = std::cos(theta), st = std::sin(theta);
    const float base[3] = {0.3f + 0.07f * ((cls * 3) % 10), 0.3f + 0.07f * ((cls * 7) % 10),
                           0.3f + 0.07f * (cls % 10)};
    const float contrast = uniform(rng, 0.2f, 0.55f);
    const float bright = uniform(rng, -0.15f, 0.15f);
    float chan_off[3];
    for (float& v : chan_off) v = uniform(rng, -0.1f, 0.1f);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const float grat = 0.5f + 0.5f * std::sin(freq * (ct * x + st * y) + phase);
            for (int c = 0; c < 3; ++c) {
                const float v = base[c] * contrast * grat + 0.25f + bright + chan_off[c] +
                                gaussian(rng, 0.0f, 0.18f);
                img.at(y, x, c) = clamp01(v);
            }
        }
    return img;
}

inline LabeledDataset generate_objects_split(const SyntheticObjectsSpec& spec, Split split) {
    const int per_class = (split == Split::train) ? spec.train_per_class : spec.test_per_class;
    const std::uint64_t split_tag = (split == Split::train) ? 0x6f74 : 0x6f65;
    LabeledDataset ds;
    ds.class_count = 10;
    ds.split = split;
    for (int cls = 0; cls < 10; ++cls)
        for (int i = 0; i < per_class; ++i) {
            Rng rng(derive_seed(derive_seed(spec.seed, split_tag), (cls << 20) | i));
            ds.items.emplace_back(make_object_image(cls, rng), cls);
        }
    return ds;
}

struct SyntheticObjects {
    LabeledDataset train;
    LabeledDataset test;
};

inline SyntheticObjects generate_objects(const SyntheticObjectsSpec& spec) {
    return {generate_objects_split(spec, Split::train), generate_objects_split(spec, Split::test)};
}

// ---------------------------------------------------------------------------
// Procedural identity set for verification: each identity is a fixed smooth
// random texture; per-image nuisances are shift, gain, offset and noise.

struct IdentitySetSpec {
    int identity_count = 24;
    int images_per_identity = 12;
    std::uint64_t seed = 0;

    void validate() const {
        if (identity_count < 2) throw ConfigError("identity set needs >= 2 identities");
        if (images_per_identity < 2) throw ConfigError("identities need >= 2 images each");
    }
};

namespace detail {

// 8x8 gaussian field upsampled bilinearly to 32x32, rescaled to mid-range.
inline Image make_identity_base(Rng& rng) {
    constexpr int small = 8, side = 32;
    std::array<std::array<std::array<float, 3>, small>, small> f{};
    float max_abs = 1e-6f;
    for (int y = 0; y < small; ++y)
        for (int x = 0; x < small; ++x)
            for (int c = 0; c < 3; ++c) {
                f[y][x][c] = gaussian(rng, 0.0f, 1.0f);
                max_abs = std::max(max_abs, std::abs(f[y][x][c]));
            }
    Image img(side, side, 3);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const float fy = (y + 0.5f) * small / side - 0.5f;
            const float fx = (x + 0.5f) * small / side - 0.5f;
            const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, small - 1);
            const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, small - 1);
            const int y1 = std::min(y0 + 1, small - 1);
            const int x1 = std::min(x0 + 1, small - 1);
            const float wy = std::clamp(fy - y0, 0.0f, 1.0f);
            const float wx = std::clamp(fx - x0, 0.0f, 1.0f);
            for (int c = 0; c < 3; ++c) {
                const float v = (1 - wy) * ((1 - wx) * f[y0][x0][c] + wx * f[y0][x1][c]) +
                                wy * ((1 - wx) * f[y1][x0][c] + wx * f[y1][x1][c]);
                img.at(y, x, c) = std::clamp(0.5f + 0.22f * v / max_abs, 0.05f, 0.95f);
            }
        }
    return img;
}

inline Image make_identity_image(const Image& base, Rng& rng) {
    const int sy = uniform_int(rng, -2, 2);
    const int sx = uniform_int(rng, -2, 2);
    const float gain = uniform(rng, 0.85f, 1.15f);
    const float offset = uniform(rng, -0.08f, 0.08f);
    Image img(base.shape);
    const int h = base.shape.h, w = base.shape.w;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int oy = ((y - sy) % h + h) % h;
            const int ox = ((x - sx) % w + w) % w;
            for (int c = 0; c < base.shape.c; ++c)
                img.at(y, x, c) =
                    clamp01(base.at(oy, ox, c) * gain + offset + gaussian(rng, 0.0f, 0.05f));
        }
    return img;
}

}  // namespace detail

struct IdentitySet {
    LabeledDataset train;  // labels are identity indices
    LabeledDataset test;
    int identity_count = 0;
};

// Splits each identity's images: first 2/3 train, rest test.
inline IdentitySet generate_identities(const IdentitySetSpec& spec) {
    spec.validate();
    IdentitySet out;
    out.identity_count = spec.identity_count;
    out.train.class_count = spec.identity_count;
    out.train.split = Split::train;
    out.test.class_count = spec.identity_count;
    out.test.split = Split::test;
    const int train_per = (spec.images_per_identity * 2) / 3;
    for (int id = 0; id < spec.identity_count; ++id) {
        Rng base_rng(derive_seed(spec.seed, 0x6964, id));
        const Image base = detail::make_identity_base(base_rng);
        for (int i = 0; i < spec.images_per_identity; ++i) {
            Rng img_rng(derive_seed(spec.seed, 0x696d, (id << 16) | i));
            Image img = detail::make_identity_image(base, img_rng);
            auto& ds = (i < train_per) ? out.train : out.test;
            ds.items.emplace_back(std::move(img), id);
        }
    }
    return out;
}

}  // namespace advkit
