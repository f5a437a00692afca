#include "gmmil/metrics.hpp"

#include <cmath>

namespace gmmil {

ConfusionMatrix ConfusionMatrix::from_predictions(
    const std::vector<int>& truth, const std::vector<int>& predicted,
    int n_classes) {
  if (truth.size() != predicted.size())
    throw ArgumentError("confusion matrix: label/prediction length mismatch");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || predicted[i] < 0 ||
        predicted[i] >= n_classes)
      throw ArgumentError("confusion matrix: class id out of range");
    ++cm.counts(truth[i], predicted[i]);
  }
  return cm;
}

namespace {

long require_total(const ConfusionMatrix& cm) {
  const long total = cm.total();
  if (total <= 0) throw ArgumentError("metrics require a nonempty matrix");
  return total;
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  const long total = require_total(cm);
  return double(cm.counts.diagonal().cast<long>().sum()) / double(total);
}

double weighted_f1(const ConfusionMatrix& cm) {
  const long total = require_total(cm);
  double f1 = 0;
  for (int c = 0; c < cm.n_classes(); ++c) {
    const long support = cm.counts.row(c).cast<long>().sum();  // truth count
    const long col = cm.counts.col(c).cast<long>().sum();      // predictions
    const long tp = cm.counts(c, c);
    const double prec = col > 0 ? double(tp) / double(col) : 0.0;
    const double rec = support > 0 ? double(tp) / double(support) : 0.0;
    const double f1_c =
        (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    f1 += double(support) / double(total) * f1_c;
  }
  return f1;
}

double cohen_kappa(const ConfusionMatrix& cm) {
  const long total = require_total(cm);
  const double po = accuracy(cm);
  double pe = 0;
  for (int c = 0; c < cm.n_classes(); ++c) {
    const double row = double(cm.counts.row(c).cast<long>().sum());
    const double col = double(cm.counts.col(c).cast<long>().sum());
    pe += row * col / (double(total) * double(total));
  }
  if (pe >= 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

double mcc(const ConfusionMatrix& cm) {
  const long total = require_total(cm);
  // multiclass MCC via the trace/marginals form
  const double s = double(total);
  const double c = double(cm.counts.diagonal().cast<long>().sum());
  double sum_pt = 0, sum_pp = 0, sum_tt = 0;
  for (int k = 0; k < cm.n_classes(); ++k) {
    const double t = double(cm.counts.row(k).cast<long>().sum());
    const double p = double(cm.counts.col(k).cast<long>().sum());
    sum_pt += p * t;
    sum_pp += p * p;
    sum_tt += t * t;
  }
  const double num = c * s - sum_pt;
  const double den = std::sqrt((s * s - sum_pp) * (s * s - sum_tt));
  if (den == 0.0) return 0.0;
  return num / den;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  return {accuracy(cm), weighted_f1(cm), cohen_kappa(cm), mcc(cm)};
}

}  // namespace gmmil
