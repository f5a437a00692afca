#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "gmmil/gmm.hpp"

namespace gmmil {

// Maximum-likelihood classifier over independent per-class GMMs. Immutable:
// add/remove return a new set.
class ClassifierSet {
 public:
  ClassifierSet() = default;

  ClassifierSet add_class(int class_id, GmmModel model) const;
  ClassifierSet remove_class(int class_id) const;

  // argmax over per-class log-likelihoods, ties to the lowest class id
  int predict(const Eigen::VectorXd& z) const;
  // also exposes the raw score vector, ordered like class_ids()
  std::pair<int, Eigen::VectorXd> predict_with_scores(
      const Eigen::VectorXd& z) const;
  std::vector<int> predict_batch(const Eigen::MatrixXd& zs) const;
  // per-class log-likelihoods for a batch, one column per class id
  Eigen::MatrixXd score_batch(const Eigen::MatrixXd& zs) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(int class_id) const { return entries_.count(class_id) > 0; }
  const GmmModel& model(int class_id) const;
  std::vector<int> class_ids() const;
  int latent_dim() const { return latent_dim_; }

 private:
  std::map<int, GmmModel> entries_;
  int latent_dim_ = 0;
};

}  // namespace gmmil
