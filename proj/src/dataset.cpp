#include "relpca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "relpca/errors.hpp"
#include "relpca/rng.hpp"

namespace relpca {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803u;
constexpr std::uint32_t kLabelMagic = 0x00000801u;

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes, std::size_t at) {
    if (at + 4 > bytes.size()) throw Truncated("idx header ends early");
    return (std::uint32_t(bytes[at]) << 24) | (std::uint32_t(bytes[at + 1]) << 16) |
           (std::uint32_t(bytes[at + 2]) << 8) | std::uint32_t(bytes[at + 3]);
}

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to " + path);
}

}  // namespace

ImageSet parse_idx_images(const std::vector<std::uint8_t>& bytes) {
    const std::uint32_t magic = read_u32_be(bytes, 0);
    if (magic != kImageMagic)
        throw BadMagic("expected image magic 0x00000803, got 0x" + std::to_string(magic));
    ImageSet set;
    set.count = read_u32_be(bytes, 4);
    set.rows = read_u32_be(bytes, 8);
    set.cols = read_u32_be(bytes, 12);
    const std::size_t need = 16 + std::size_t(set.count) * set.rows * set.cols;
    if (bytes.size() < need) throw Truncated("image payload shorter than header implies");
    set.pixels.resize(set.count, set.dim());
    std::size_t at = 16;
    for (Index i = 0; i < set.count; ++i)
        for (Index j = 0; j < set.dim(); ++j) set.pixels(i, j) = bytes[at++] / 255.0;
    return set;
}

LabelSet parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
    const std::uint32_t magic = read_u32_be(bytes, 0);
    if (magic != kLabelMagic)
        throw BadMagic("expected label magic 0x00000801, got 0x" + std::to_string(magic));
    const std::uint32_t count = read_u32_be(bytes, 4);
    if (bytes.size() < 8 + std::size_t(count)) throw Truncated("label payload shorter than count");
    LabelSet set;
    set.labels.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) set.labels.push_back(bytes[8 + i]);
    return set;
}

std::vector<std::uint8_t> serialize_idx_images(const ImageSet& images) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + std::size_t(images.count) * images.dim());
    append_u32_be(out, kImageMagic);
    append_u32_be(out, static_cast<std::uint32_t>(images.count));
    append_u32_be(out, static_cast<std::uint32_t>(images.rows));
    append_u32_be(out, static_cast<std::uint32_t>(images.cols));
    for (Index i = 0; i < images.count; ++i)
        for (Index j = 0; j < images.dim(); ++j)
            out.push_back(static_cast<std::uint8_t>(std::llround(images.pixels(i, j) * 255.0)));
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const LabelSet& labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.labels.size());
    append_u32_be(out, kLabelMagic);
    append_u32_be(out, static_cast<std::uint32_t>(labels.labels.size()));
    for (int v : labels.labels) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

ImageSet load_idx_images(const std::string& path) { return parse_idx_images(read_file(path)); }
LabelSet load_idx_labels(const std::string& path) { return parse_idx_labels(read_file(path)); }
void save_idx_images(const std::string& path, const ImageSet& images) {
    write_file(path, serialize_idx_images(images));
}
void save_idx_labels(const std::string& path, const LabelSet& labels) {
    write_file(path, serialize_idx_labels(labels));
}

Dataset select_subset(const ImageSet& images, const LabelSet& labels,
                      const std::vector<int>& digits, Index per_class,
                      std::uint64_t seed) {
    if (images.count != labels.count())
        throw LengthMismatch("image/label counts differ");
    std::vector<int> wanted(digits);
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    Dataset out;
    out.points.resize(static_cast<Index>(wanted.size()) * per_class, images.dim());
    out.labels.reserve(out.points.rows());
    out.has_labels = true;

    Index row = 0;
    for (int digit : wanted) {
        std::vector<Index> pool;
        for (Index i = 0; i < images.count; ++i)
            if (labels.labels[static_cast<std::size_t>(i)] == digit) pool.push_back(i);
        if (static_cast<Index>(pool.size()) < per_class)
            throw InsufficientClassCount("digit " + std::to_string(digit) + " has " +
                                         std::to_string(pool.size()) + " < " +
                                         std::to_string(per_class) + " instances");
        // Fisher-Yates on a per-digit stream: the draw for this digit is the
        // same no matter which other digits are requested.
        RngStream rng = derive_stream(seed, "subset", static_cast<std::uint64_t>(digit));
        for (std::size_t i = pool.size() - 1; i > 0; --i) {
            const std::size_t j = rng.uniform_index(i + 1);
            std::swap(pool[i], pool[j]);
        }
        for (Index k = 0; k < per_class; ++k) {
            out.points.row(row) = images.pixels.row(pool[static_cast<std::size_t>(k)]);
            out.labels.push_back(digit);
            ++row;
        }
    }
    return out;
}

}  // namespace relpca
