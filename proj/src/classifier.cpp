#include "gmmil/classifier.hpp"

namespace gmmil {

ClassifierSet ClassifierSet::add_class(int class_id, GmmModel model) const {
  if (contains(class_id))
    throw ConsistencyError("add_class: class " + std::to_string(class_id) +
                           " already present");
  if (!entries_.empty() && model.dim() != latent_dim_)
    throw ArgumentError("add_class: latent dimension mismatch");
  if (model.chol.empty() && !model.prepare())
    throw NumericError("add_class: model covariance not positive definite");
  ClassifierSet out = *this;
  out.latent_dim_ = model.dim();
  out.entries_.emplace(class_id, std::move(model));
  return out;
}

ClassifierSet ClassifierSet::remove_class(int class_id) const {
  if (!contains(class_id))
    throw ArgumentError("remove_class: class " + std::to_string(class_id) +
                        " not present");
  ClassifierSet out = *this;
  out.entries_.erase(class_id);
  return out;
}

const GmmModel& ClassifierSet::model(int class_id) const {
  auto it = entries_.find(class_id);
  if (it == entries_.end())
    throw ArgumentError("model: class " + std::to_string(class_id) +
                        " not present");
  return it->second;
}

std::vector<int> ClassifierSet::class_ids() const {
  std::vector<int> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, _] : entries_) ids.push_back(id);
  return ids;
}

Eigen::MatrixXd ClassifierSet::score_batch(const Eigen::MatrixXd& zs) const {
  if (empty()) throw StateError("classifier has no classes");
  Eigen::MatrixXd scores(zs.rows(), Eigen::Index(entries_.size()));
  Eigen::Index col = 0;
  for (const auto& [id, model] : entries_)
    scores.col(col++) = log_likelihood_batch(model, zs);
  return scores;
}

std::pair<int, Eigen::VectorXd> ClassifierSet::predict_with_scores(
    const Eigen::VectorXd& z) const {
  Eigen::MatrixXd scores = score_batch(z.transpose());
  const auto ids = class_ids();
  int best = 0;
  for (int c = 1; c < int(ids.size()); ++c)
    if (scores(0, c) > scores(0, best)) best = c;  // ties keep lowest id
  return {ids[std::size_t(best)], scores.row(0).transpose()};
}

int ClassifierSet::predict(const Eigen::VectorXd& z) const {
  return predict_with_scores(z).first;
}

std::vector<int> ClassifierSet::predict_batch(
    const Eigen::MatrixXd& zs) const {
  Eigen::MatrixXd scores = score_batch(zs);
  const auto ids = class_ids();
  std::vector<int> out(std::size_t(zs.rows()));
  for (Eigen::Index i = 0; i < zs.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < int(ids.size()); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[std::size_t(i)] = ids[std::size_t(best)];
  }
  return out;
}

}  // namespace gmmil
