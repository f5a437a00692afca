#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gmmil/autoenc.hpp"
#include "gmmil/classifier.hpp"

namespace gmmil {

struct GridSpec {
  double min_x = -1, max_x = 1;
  double min_y = -1, max_y = 1;
  int resolution = 50;  // 50x50 = 2500 grid points
};

// Covariance ellipse at 2 sigma: center, semi-axis lengths, rotation.
struct EllipseOverlay {
  int class_id = 0;
  int component = 0;
  double center_x = 0, center_y = 0;
  double semi_major = 0, semi_minor = 0;
  double angle_rad = 0;
};

struct DecisionMap {
  GridSpec grid;
  std::vector<int> predictions;  // row-major, resolution^2 entries
  std::vector<EllipseOverlay> overlays;
};

// Classifies every point of a 2-D grid; requires latent_dim == 2.
DecisionMap decision_map(const ClassifierSet& set, const GridSpec& grid);

// decode() applied to each component mean; one image per row.
Eigen::MatrixXd decode_component_means(const GmmModel& model,
                                       const AutoencoderModel& decoder);

// Monte-Carlo Jensen-Shannon divergence (natural log), clamped to [0, ln 2].
double js_distance(const GmmModel& a, const GmmModel& b, int n_samples,
                   std::uint64_t seed);

struct DistanceMatrix {
  std::vector<int> class_ids;
  Eigen::MatrixXd values;  // symmetric, zero diagonal
};

DistanceMatrix distance_matrix(const ClassifierSet& set, int n_samples,
                               std::uint64_t seed);

struct SpearmanResult {
  double rho = 0;
  double p_value = 1;
};

// Rank correlation with average ranks for ties; two-sided permutation
// p-value (10000 permutations).
SpearmanResult spearman(const std::vector<double>& x,
                        const std::vector<double>& y,
                        std::uint64_t seed = 12345);

// Binary PGM (P5, maxval 255) for a 28x28 image given as a 784-row vector.
void write_pgm(const std::string& path, const Eigen::VectorXd& image);

}  // namespace gmmil
