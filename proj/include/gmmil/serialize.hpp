#pragma once

#include <cstdint>
#include <string>

#include "gmmil/classifier.hpp"

namespace gmmil {

// "GMMIL-GMM" container: version, class id, hyperparameters, then weights,
// means and covariances as little-endian doubles.
void save_gmm(const GmmModel& model, int class_id, const std::string& path);
std::pair<GmmModel, int> load_gmm(const std::string& path);

// FNV-1a over the file bytes; used to pin a bundle to its encoder.
std::uint64_t file_hash(const std::string& path);

struct ClassifierBundle {
  ClassifierSet set;
  std::string encoder_file;
  std::uint64_t encoder_hash = 0;
};

// Writes gmm_<id>.bin per class plus manifest.json referencing the encoder.
void save_bundle(const ClassifierSet& set, const std::string& dir,
                 const std::string& encoder_path);

// Loads a bundle; throws ConsistencyError when the recorded encoder hash no
// longer matches the encoder file (guards against mixed latent spaces).
ClassifierBundle load_bundle(const std::string& dir);

}  // namespace gmmil
