#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "advkit/errors.hpp"
#include "advkit/tensor.hpp"

namespace advkit {

using json = nlohmann::ordered_json;

enum class Split { train, test };

inline std::string split_name(Split s) { return s == Split::train ? "train" : "test"; }

struct LabeledDataset {
    std::vector<std::pair<Image, int>> items;
    int class_count = 0;
    Split split = Split::train;

    std::size_t size() const { return items.size(); }
    const Image& image(std::size_t i) const { return items[i].first; }
    int label(std::size_t i) const { return items[i].second; }

    void validate() const {
        for (const auto& [img, y] : items) {
            if (y < 0 || y >= class_count)
                throw DataError("label out of range: " + std::to_string(y));
            if (!items.empty() && !(img.shape == items.front().first.shape))
                throw DataError("inconsistent image shapes in dataset");
        }
    }

    std::uint64_t content_hash() const {
        std::uint64_t h = fnv1a(&class_count, sizeof(class_count));
        for (const auto& [img, y] : items) {
            h = fnv1a(&y, sizeof(y), h);
            h = fnv1a(img.data.data(), img.data.size() * sizeof(float), h);
        }
        return h;
    }
};

// Binary blob format: magic, class_count, item count, shape, then
// label + float pixels per item. A JSON sidecar carries provenance.
inline void save_dataset(const LabeledDataset& ds, const std::filesystem::path& blob_path) {
    std::ofstream out(blob_path, std::ios::binary);
    if (!out) throw DataError("cannot open for write: " + blob_path.string());
    const char magic[4] = {'A', 'D', 'S', '1'};
    out.write(magic, 4);
    const std::int32_t cc = ds.class_count;
    const std::int64_t n = static_cast<std::int64_t>(ds.items.size());
    const std::int32_t sp = (ds.split == Split::train) ? 0 : 1;
    Shape shape = ds.items.empty() ? Shape{} : ds.items.front().first.shape;
    out.write(reinterpret_cast<const char*>(&cc), sizeof(cc));
    out.write(reinterpret_cast<const char*>(&sp), sizeof(sp));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&shape), sizeof(shape));
    for (const auto& [img, y] : ds.items) {
        const std::int32_t label = y;
        out.write(reinterpret_cast<const char*>(&label), sizeof(label));
        out.write(reinterpret_cast<const char*>(img.data.data()),
                  static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    }
    if (!out) throw DataError("write failed: " + blob_path.string());
}

inline LabeledDataset load_dataset(const std::filesystem::path& blob_path) {
    std::ifstream in(blob_path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + blob_path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "ADS1")
        throw DataError("bad dataset magic in " + blob_path.string());
    std::int32_t cc = 0, sp = 0;
    std::int64_t n = 0;
    Shape shape;
    in.read(reinterpret_cast<char*>(&cc), sizeof(cc));
    in.read(reinterpret_cast<char*>(&sp), sizeof(sp));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&shape), sizeof(shape));
    if (!in || n < 0 || cc <= 0) throw DataError("corrupt dataset header: " + blob_path.string());
    LabeledDataset ds;
    ds.class_count = cc;
    ds.split = (sp == 0) ? Split::train : Split::test;
    ds.items.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        std::int32_t label = 0;
        in.read(reinterpret_cast<char*>(&label), sizeof(label));
        Image img(shape);
        in.read(reinterpret_cast<char*>(img.data.data()),
                static_cast<std::streamsize>(img.data.size() * sizeof(float)));
        if (!in) throw DataError("truncated dataset blob: " + blob_path.string());
        ds.items.emplace_back(std::move(img), label);
    }
    ds.validate();
    return ds;
}

inline void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for write: " + path.string());
    out << j.dump(2) << "\n";
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw DataError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace advkit
