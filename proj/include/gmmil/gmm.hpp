#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gmmil/common.hpp"

namespace gmmil {

enum class CovarianceKind { full, tied, diagonal, spherical };

const char* covariance_kind_name(CovarianceKind kind);
CovarianceKind covariance_kind_from_name(const std::string& name);

struct GmmHyperParams {
  int n_components = 1;                          // 1..5 in the search grid
  CovarianceKind kind = CovarianceKind::full;
  double reg_covar = 1e-3;                       // added to covariance diagonals
};

// One class-conditional mixture over the latent space. Covariance storage
// depends on the kind: `cov_full` holds K matrices (full) or one shared
// matrix (tied); `cov_diag` is K x d (diagonal); `cov_spherical` length K.
struct GmmModel {
  GmmHyperParams hyper;
  Eigen::VectorXd weights;                // K, sums to 1
  Eigen::MatrixXd means;                  // K x d
  std::vector<Eigen::MatrixXd> cov_full;  // full/tied
  Eigen::MatrixXd cov_diag;               // diagonal
  Eigen::VectorXd cov_spherical;          // spherical
  double train_log_likelihood = 0;

  // scoring cache, rebuilt by prepare(): lower Cholesky factors and
  // log-determinants per component (tied stores one of each)
  std::vector<Eigen::MatrixXd> chol;
  std::vector<double> log_det;

  int n_components() const { return int(weights.size()); }
  int dim() const { return int(means.cols()); }

  // Rebuilds the Cholesky cache. Returns false when a covariance is not
  // positive definite.
  bool prepare();
};

struct NonConvergence {
  std::string reason;
};

struct EmResult {
  GmmModel model;
  bool converged = false;  // tolerance met within the iteration cap
  int n_iterations = 0;
  std::vector<double> log_likelihood_history;  // total LL per E-step
};

struct FitReport {
  bool converged = false;
  int n_iterations = 0;
  double bic_train = 0;
  double bic_validation = 0;
};

struct KMeansResult {
  Eigen::MatrixXd centers;      // K x d
  std::vector<int> assignment;  // per data row
};

// k-means++ seeding followed by Lloyd iterations to an assignment fixpoint
// (cap 100). Empty clusters are reseeded to the farthest point.
KMeansResult kmeans_init(const Eigen::MatrixXd& data, int n_clusters,
                         std::uint64_t seed);

// EM for one hyperparameter cell. NonConvergence is returned for
// singular/degenerate fits (Cholesky failure, non-finite likelihood,
// collapsed component), not for merely hitting the iteration cap.
std::variant<EmResult, NonConvergence> em_fit(const Eigen::MatrixXd& data,
                                              const GmmHyperParams& hyper,
                                              std::uint64_t seed);

// log sum_k w_k N(x; mu_k, Sigma_k) via log-sum-exp.
double log_likelihood(const GmmModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd log_likelihood_batch(const GmmModel& model,
                                     const Eigen::MatrixXd& data);

// Per-component log(w_k) + log N(x; mu_k, Sigma_k), one row per datum.
Eigen::MatrixXd weighted_log_prob(const GmmModel& model,
                                  const Eigen::MatrixXd& data);

// p ln(n) - 2 L with the per-kind free parameter count.
double bic(const GmmModel& model, const Eigen::MatrixXd& data);
int free_parameter_count(const GmmHyperParams& hyper, int dim);

// Enumerates the 5x4x4 grid in tie-break order: components ascending, kind
// full < tied < diagonal < spherical, regularization descending.
std::vector<GmmHyperParams> hyperparameter_grid();

// Fits the whole grid and returns the converged candidate with minimum
// validation BIC. Per-cell seeds are seed XOR cell index.
std::pair<GmmModel, FitReport> select_model(const Eigen::MatrixXd& train,
                                            const Eigen::MatrixXd& validation,
                                            std::uint64_t seed);

Eigen::MatrixXd sample(const GmmModel& model, int n, std::uint64_t seed);

// Component means in component order, K x d.
Eigen::MatrixXd component_means(const GmmModel& model);

}  // namespace gmmil
