#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gmmil/common.hpp"

namespace gmmil {

constexpr int kImageRows = 28;
constexpr int kImageCols = 28;
constexpr int kImagePixels = kImageRows * kImageCols;
constexpr int kNumClasses = 10;

enum class Split { train, validation, test };

// Images stored one per row, 784 columns, values in [0,1]
// (raw byte / 255). Row-major pixel order within a row.
struct LabeledDataset {
  Eigen::MatrixXd images;
  std::vector<int> labels;
  Split split = Split::train;

  Eigen::Index size() const { return images.rows(); }
  std::vector<std::size_t> class_indices(int label) const;
};

struct SampleProfile {
  std::map<int, std::size_t> per_class_counts;  // class id -> count >= 1
  std::uint64_t seed = 0;
};

struct TaskStream {
  std::vector<std::vector<int>> tasks;  // task 1 has 6 classes, then 2, 2
  int rotation_index = 0;
};

// Reads a Fashion-MNIST IDX image/label file pair. Big-endian headers,
// magic 0x803 (images) / 0x801 (labels). Record order is preserved.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path,
                        Split split = Split::train);

// Stratified 80/20 partition of the 60K training file: 4800/1200 per class.
std::pair<LabeledDataset, LabeledDataset> split_train_val(
    const LabeledDataset& full_train, std::uint64_t seed);

// Per class, takes the first n items of a seed-determined permutation, so
// smaller subsamples nest inside larger ones.
LabeledDataset subsample(const LabeledDataset& ds, const SampleProfile& profile);

// Keeps only the given classes, preserving order.
LabeledDataset filter_classes(const LabeledDataset& ds,
                              const std::vector<int>& classes);

// Split-pair incremental protocol: classes rotated by rotation_index then
// grouped 6/2/2.
TaskStream build_task_stream(int rotation_index);

}  // namespace gmmil
