#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmmil/analysis.hpp"
#include "gmmil/autoenc.hpp"
#include "gmmil/classifier.hpp"
#include "gmmil/dataset.hpp"
#include "gmmil/metrics.hpp"

namespace gmmil {

struct ExperimentConfig {
  std::string kind;  // baseline | small-sample | imbalanced | incremental
  std::string data_dir;
  std::string output_dir;
  std::uint64_t seed = 7;
  bool fast = false;        // reduced epochs / per-class caps for CI runs
  int small_sample_seeds = 5;
};

struct ResultRow {
  std::string experiment;
  std::string variant;     // rotation or seed
  std::string classifier;  // gmm | softmax
  std::string param;       // task id, sample size, profile...
  std::string metric;
  double value = 0;
};

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm);

// Training knobs per run mode. Full settings reproduce the reference
// protocol; fast reduces encoder epochs and caps per-class GMM data.
struct RunSettings {
  ScheduleSpec schedule;       // autoencoder training
  ScheduleSpec head_schedule;  // softmax head (cheap: trains on latents)
  int gmm_train_cap = 0;       // 0 = use everything
  int gmm_val_cap = 0;

  static RunSettings from_config(const ExperimentConfig& cfg);
};

// train/validation/test triple with per-class encoded features cached
struct DataBundle {
  LabeledDataset train, validation, test;
};

DataBundle load_data(const ExperimentConfig& cfg);

// Fits one class's GMM by validation-BIC grid selection over the (possibly
// capped) per-class features.
GmmModel fit_class_gmm(const Eigen::MatrixXd& train_features,
                       const Eigen::MatrixXd& val_features,
                       std::uint64_t seed);

std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg);
std::vector<ResultRow> run_small_sample(const ExperimentConfig& cfg);
std::vector<ResultRow> run_imbalanced(const ExperimentConfig& cfg);
std::vector<ResultRow> run_incremental(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Two-sided paired Student t-test over matched observations.
double paired_t_test_p(const std::vector<double>& a,
                       const std::vector<double>& b);

// mean +/- 1.96 * sd / sqrt(n)
std::pair<double, double> mean_ci95(const std::vector<double>& values);

}  // namespace gmmil
