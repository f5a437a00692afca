#include "gmmil/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace gmmil {

namespace {

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(path + ": truncated header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

std::vector<std::size_t> LabeledDataset::class_indices(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path, Split split) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) throw FormatError(images_path + ": cannot open");
  std::ifstream labs(labels_path, std::ios::binary);
  if (!labs) throw FormatError(labels_path + ": cannot open");

  if (read_u32_be(imgs, images_path) != 0x803u)
    throw FormatError(images_path + ": bad magic, expected 0x00000803");
  const std::uint32_t n_images = read_u32_be(imgs, images_path);
  const std::uint32_t rows = read_u32_be(imgs, images_path);
  const std::uint32_t cols = read_u32_be(imgs, images_path);
  if (rows != kImageRows || cols != kImageCols)
    throw FormatError(images_path + ": expected 28x28 images");

  if (read_u32_be(labs, labels_path) != 0x801u)
    throw FormatError(labels_path + ": bad magic, expected 0x00000801");
  const std::uint32_t n_labels = read_u32_be(labs, labels_path);
  if (n_images != n_labels)
    throw ConsistencyError(images_path + ": " + std::to_string(n_images) +
                           " images but " + std::to_string(n_labels) +
                           " labels");

  LabeledDataset ds;
  ds.split = split;
  ds.images.resize(n_images, kImagePixels);
  ds.labels.resize(n_labels);

  std::vector<unsigned char> buf(kImagePixels);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    if (!imgs.read(reinterpret_cast<char*>(buf.data()), kImagePixels))
      throw FormatError(images_path + ": truncated image data");
    for (int p = 0; p < kImagePixels; ++p)
      ds.images(i, p) = double(buf[p]) / 255.0;
  }
  std::vector<unsigned char> lbuf(n_labels);
  if (!labs.read(reinterpret_cast<char*>(lbuf.data()), n_labels))
    throw FormatError(labels_path + ": truncated label data");
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    if (lbuf[i] > 9)
      throw FormatError(labels_path + ": label out of range");
    ds.labels[i] = int(lbuf[i]);
  }
  return ds;
}

namespace {

LabeledDataset take_rows(const LabeledDataset& ds,
                         const std::vector<std::size_t>& idx, Split split) {
  LabeledDataset out;
  out.split = split;
  out.images.resize(Eigen::Index(idx.size()), ds.images.cols());
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.images.row(Eigen::Index(i)) = ds.images.row(Eigen::Index(idx[i]));
    out.labels[i] = ds.labels[idx[i]];
  }
  return out;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> split_train_val(
    const LabeledDataset& full_train, std::uint64_t seed) {
  if (full_train.size() != 60000)
    throw ArgumentError("split_train_val expects the full 60000-record set");

  std::vector<std::size_t> train_idx, val_idx;
  for (int c = 0; c < kNumClasses; ++c) {
    auto idx = full_train.class_indices(c);
    Rng rng(derive_seed(seed, std::uint64_t(c)));
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n_train = idx.size() * 4 / 5;
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
    val_idx.insert(val_idx.end(), idx.begin() + n_train, idx.end());
  }
  // restore file order within each part
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {take_rows(full_train, train_idx, Split::train),
          take_rows(full_train, val_idx, Split::validation)};
}

LabeledDataset subsample(const LabeledDataset& ds,
                         const SampleProfile& profile) {
  std::vector<std::size_t> selected;
  for (const auto& [cls, count] : profile.per_class_counts) {
    if (count < 1)
      throw ArgumentError("subsample: counts must be >= 1 (class " +
                          std::to_string(cls) + ")");
    auto idx = ds.class_indices(cls);
    if (count > idx.size())
      throw CapacityError("subsample: class " + std::to_string(cls) +
                          " has " + std::to_string(idx.size()) +
                          " samples, requested " + std::to_string(count));
    // fixed per-class permutation; prefixes give nested subsets
    Rng rng(derive_seed(profile.seed, 0x5a5a0000ULL + std::uint64_t(cls)));
    std::shuffle(idx.begin(), idx.end(), rng);
    selected.insert(selected.end(), idx.begin(), idx.begin() + count);
  }
  std::sort(selected.begin(), selected.end());
  return take_rows(ds, selected, ds.split);
}

LabeledDataset filter_classes(const LabeledDataset& ds,
                              const std::vector<int>& classes) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    if (std::find(classes.begin(), classes.end(), ds.labels[i]) !=
        classes.end())
      keep.push_back(i);
  return take_rows(ds, keep, ds.split);
}

TaskStream build_task_stream(int rotation_index) {
  if (rotation_index < 0 || rotation_index > 9)
    throw ArgumentError("rotation_index must be in [0,9]");
  std::vector<int> order(kNumClasses);
  for (int i = 0; i < kNumClasses; ++i)
    order[i] = (i + rotation_index) % kNumClasses;
  TaskStream ts;
  ts.rotation_index = rotation_index;
  ts.tasks = {{order.begin(), order.begin() + 6},
              {order.begin() + 6, order.begin() + 8},
              {order.begin() + 8, order.end()}};
  return ts;
}

}  // namespace gmmil
