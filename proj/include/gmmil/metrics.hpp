#pragma once

#include <Eigen/Core>
#include <vector>

#include "gmmil/common.hpp"

namespace gmmil {

// Rows are true classes, columns predictions.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int n_classes)
      : counts(Eigen::MatrixXi::Zero(n_classes, n_classes)) {}

  static ConfusionMatrix from_predictions(const std::vector<int>& truth,
                                          const std::vector<int>& predicted,
                                          int n_classes);

  int n_classes() const { return int(counts.rows()); }
  long total() const { return counts.cast<long>().sum(); }
};

struct MetricsReport {
  double accuracy = 0;
  double weighted_f1 = 0;
  double cohen_kappa = 0;
  double mcc = 0;
};

double accuracy(const ConfusionMatrix& cm);
double weighted_f1(const ConfusionMatrix& cm);
double cohen_kappa(const ConfusionMatrix& cm);
double mcc(const ConfusionMatrix& cm);

MetricsReport compute_metrics(const ConfusionMatrix& cm);

}  // namespace gmmil
