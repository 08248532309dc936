#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpca/types.hpp"

namespace relpca {

// Row-major image collection normalized to [0,1]; one image per row.
struct ImageSet {
    Index count = 0;
    Index rows = 0;
    Index cols = 0;
    MatrixXd pixels;  // count x (rows*cols)

    Index dim() const { return rows * cols; }
};

struct LabelSet {
    std::vector<int> labels;

    Index count() const { return static_cast<Index>(labels.size()); }
};

struct Dataset {
    MatrixXd points;  // n x m, values in [0,1]
    std::vector<int> labels;
    bool has_labels = false;

    Index n() const { return points.rows(); }
    Index dim() const { return points.cols(); }
};

// IDX format, bit-exact: big-endian magic 0x00000803 (images, three u32 dims)
// or 0x00000801 (labels, one u32 count), unsigned-byte payload, row-major.
ImageSet parse_idx_images(const std::vector<std::uint8_t>& bytes);
LabelSet parse_idx_labels(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_idx_images(const ImageSet& images);
std::vector<std::uint8_t> serialize_idx_labels(const LabelSet& labels);

ImageSet load_idx_images(const std::string& path);
LabelSet load_idx_labels(const std::string& path);
void save_idx_images(const std::string& path, const ImageSet& images);
void save_idx_labels(const std::string& path, const LabelSet& labels);

// Seeded per-class draws without replacement; the draw for one digit does not
// depend on which other digits are requested.  Output order: digit ascending,
// then draw order.
Dataset select_subset(const ImageSet& images, const LabelSet& labels,
                      const std::vector<int>& digits, Index per_class,
                      std::uint64_t seed);

}  // namespace relpca
