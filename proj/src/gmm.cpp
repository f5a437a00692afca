#include "gmmil/gmm.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gmmil {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kRelTol = 1e-3;
constexpr int kMaxEmIterations = 100;
constexpr int kMaxLloydIterations = 100;
constexpr double kWeightFloor = 1e-10;

Eigen::VectorXd row_log_sum_exp(const Eigen::MatrixXd& m) {
  Eigen::VectorXd max = m.rowwise().maxCoeff();
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!std::isfinite(max(i))) {
      out(i) = max(i);
      continue;
    }
    out(i) = max(i) + std::log((m.row(i).array() - max(i)).exp().sum());
  }
  return out;
}

}  // namespace

const char* covariance_kind_name(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::full: return "full";
    case CovarianceKind::tied: return "tied";
    case CovarianceKind::diagonal: return "diagonal";
    case CovarianceKind::spherical: return "spherical";
  }
  return "?";
}

CovarianceKind covariance_kind_from_name(const std::string& name) {
  if (name == "full") return CovarianceKind::full;
  if (name == "tied") return CovarianceKind::tied;
  if (name == "diagonal") return CovarianceKind::diagonal;
  if (name == "spherical") return CovarianceKind::spherical;
  throw ArgumentError("unknown covariance kind: " + name);
}

bool GmmModel::prepare() {
  const int k = n_components();
  const int d = dim();
  chol.clear();
  log_det.assign(std::size_t(k), 0.0);
  switch (hyper.kind) {
    case CovarianceKind::full:
    case CovarianceKind::tied: {
      const int n_mats = hyper.kind == CovarianceKind::full ? k : 1;
      for (int i = 0; i < n_mats; ++i) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov_full[std::size_t(i)]);
        if (llt.info() != Eigen::Success) return false;
        chol.push_back(llt.matrixL());
        const double ld = 2.0 * chol.back().diagonal().array().log().sum();
        if (hyper.kind == CovarianceKind::tied) {
          for (int j = 0; j < k; ++j) log_det[std::size_t(j)] = ld;
        } else {
          log_det[std::size_t(i)] = ld;
        }
      }
      break;
    }
    case CovarianceKind::diagonal:
      for (int j = 0; j < k; ++j) {
        if ((cov_diag.row(j).array() <= 0.0).any()) return false;
        log_det[std::size_t(j)] = cov_diag.row(j).array().log().sum();
      }
      break;
    case CovarianceKind::spherical:
      for (int j = 0; j < k; ++j) {
        if (cov_spherical(j) <= 0.0) return false;
        log_det[std::size_t(j)] = d * std::log(cov_spherical(j));
      }
      break;
  }
  return true;
}

KMeansResult kmeans_init(const Eigen::MatrixXd& data, int n_clusters,
                         std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  if (n < n_clusters)
    throw CapacityError("kmeans_init: fewer points than clusters");

  Rng rng(seed);
  Eigen::MatrixXd centers(n_clusters, data.cols());

  // k-means++ seeding
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = data.row(first(rng));
  Eigen::VectorXd min_d2 =
      (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < n_clusters; ++c) {
    const double total = min_d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng), acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += min_d2(i);
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = data.row(pick);
    min_d2 = min_d2.cwiseMin(
        (data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assignment(std::size_t(n), -1);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // assignment step; ||x-c||^2 up to the common ||x||^2 term
    Eigen::MatrixXd dots = data * centers.transpose();  // n x K
    Eigen::VectorXd c2 = centers.rowwise().squaredNorm();
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_val = c2(0) - 2.0 * dots(i, 0);
      for (int c = 1; c < n_clusters; ++c) {
        const double v = c2(c) - 2.0 * dots(i, c);
        if (v < best_val) {
          best_val = v;
          best = c;
        }
      }
      if (assignment[std::size_t(i)] != best) {
        assignment[std::size_t(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    centers.setZero();
    std::vector<Eigen::Index> counts(std::size_t(n_clusters), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      centers.row(assignment[std::size_t(i)]) += data.row(i);
      ++counts[std::size_t(assignment[std::size_t(i)])];
    }
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[std::size_t(c)] > 0) {
        centers.row(c) /= double(counts[std::size_t(c)]);
      } else {
        // reseed empty cluster to the point farthest from its center
        Eigen::Index far = 0;
        double far_d2 = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d2 =
              (data.row(i) - centers.row(assignment[std::size_t(i)]))
                  .squaredNorm();
          if (d2 > far_d2) {
            far_d2 = d2;
            far = i;
          }
        }
        centers.row(c) = data.row(far);
      }
    }
  }
  return {centers, assignment};
}

Eigen::MatrixXd weighted_log_prob(const GmmModel& model,
                                  const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.rows();
  const int k = model.n_components();
  const int d = model.dim();
  if (data.cols() != d)
    throw ArgumentError("log_likelihood: dimension mismatch");
  if (model.log_det.size() != std::size_t(k))
    throw StateError("log_likelihood: model not prepared (call prepare())");

  Eigen::MatrixXd logp(n, k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd quad(n);
    switch (model.hyper.kind) {
      case CovarianceKind::full:
      case CovarianceKind::tied: {
        const Eigen::MatrixXd& L =
            model.chol[model.hyper.kind == CovarianceKind::full
                           ? std::size_t(c)
                           : 0];
        Eigen::MatrixXd diff =
            (data.rowwise() - model.means.row(c)).transpose();  // d x n
        L.triangularView<Eigen::Lower>().solveInPlace(diff);
        quad = diff.colwise().squaredNorm();
        break;
      }
      case CovarianceKind::diagonal: {
        Eigen::ArrayXd inv_var = model.cov_diag.row(c).array().inverse();
        quad = ((data.rowwise() - model.means.row(c)).array().square().rowwise() *
                inv_var.transpose())
                   .rowwise()
                   .sum();
        break;
      }
      case CovarianceKind::spherical:
        quad = (data.rowwise() - model.means.row(c)).rowwise().squaredNorm() /
               model.cov_spherical(c);
        break;
    }
    logp.col(c) =
        -0.5 * (quad.array() + d * kLog2Pi + model.log_det[std::size_t(c)]) +
        std::log(model.weights(c));
  }
  return logp;
}

Eigen::VectorXd log_likelihood_batch(const GmmModel& model,
                                     const Eigen::MatrixXd& data) {
  return row_log_sum_exp(weighted_log_prob(model, data));
}

double log_likelihood(const GmmModel& model, const Eigen::VectorXd& x) {
  return log_likelihood_batch(model, x.transpose())(0);
}

namespace {

// M-step: re-estimates weights/means/covariances from responsibilities.
void m_step(const Eigen::MatrixXd& data, const Eigen::MatrixXd& resp,
            GmmModel& model) {
  const Eigen::Index n = data.rows();
  const int k = int(resp.cols());
  const int d = int(data.cols());
  const double reg = model.hyper.reg_covar;

  Eigen::VectorXd nk = resp.colwise().sum();
  model.weights = nk / double(n);
  model.means = (resp.transpose() * data).array().colwise() /
                nk.array().max(1e-300);

  switch (model.hyper.kind) {
    case CovarianceKind::full: {
      model.cov_full.assign(std::size_t(k), Eigen::MatrixXd());
      for (int c = 0; c < k; ++c) {
        Eigen::MatrixXd diff = data.rowwise() - model.means.row(c);
        Eigen::MatrixXd cov =
            (diff.transpose() * (diff.array().colwise() * resp.col(c).array())
                                    .matrix()) /
            std::max(nk(c), 1e-300);
        cov.diagonal().array() += reg;
        model.cov_full[std::size_t(c)] = cov;
      }
      break;
    }
    case CovarianceKind::tied: {
      Eigen::MatrixXd avg_x2 = data.transpose() * data;
      Eigen::MatrixXd avg_m2 =
          model.means.transpose() * nk.asDiagonal() * model.means;
      Eigen::MatrixXd cov = (avg_x2 - avg_m2) / double(n);
      cov.diagonal().array() += reg;
      model.cov_full.assign(1, cov);
      break;
    }
    case CovarianceKind::diagonal:
    case CovarianceKind::spherical: {
      Eigen::MatrixXd avg_x2 =
          (resp.transpose() * data.cwiseProduct(data)).array().colwise() /
          nk.array().max(1e-300);
      Eigen::MatrixXd var =
          (avg_x2 - model.means.cwiseProduct(model.means)).array() + reg;
      if (model.hyper.kind == CovarianceKind::diagonal) {
        model.cov_diag = var;
      } else {
        model.cov_spherical = var.rowwise().mean();
      }
      break;
    }
  }
}

}  // namespace

std::variant<EmResult, NonConvergence> em_fit(const Eigen::MatrixXd& data,
                                              const GmmHyperParams& hyper,
                                              std::uint64_t seed) {
  if (!data.allFinite())
    throw ArgumentError("em_fit: data contains non-finite entries");
  const Eigen::Index n = data.rows();
  const int k = hyper.n_components;
  if (n < k) throw CapacityError("em_fit: fewer points than components");

  EmResult res;
  res.model.hyper = hyper;

  // hard responsibilities from k-means
  KMeansResult km = kmeans_init(data, k, seed);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    resp(i, km.assignment[std::size_t(i)]) = 1.0;

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= kMaxEmIterations; ++iter) {
    m_step(data, resp, res.model);
    if (res.model.weights.minCoeff() < kWeightFloor)
      return NonConvergence{"collapsed component"};
    if (!res.model.prepare())
      return NonConvergence{"singular covariance"};

    Eigen::MatrixXd wlp = weighted_log_prob(res.model, data);
    Eigen::VectorXd lse = row_log_sum_exp(wlp);
    const double ll = lse.sum();
    if (!std::isfinite(ll)) return NonConvergence{"non-finite log-likelihood"};

    res.log_likelihood_history.push_back(ll);
    res.n_iterations = iter;
    if (iter > 1 && ll - prev_ll < kRelTol * std::abs(prev_ll)) {
      res.converged = true;
      break;
    }
    prev_ll = ll;
    resp = (wlp.colwise() - lse).array().exp();
  }
  res.model.train_log_likelihood = res.log_likelihood_history.back();
  return res;
}

int free_parameter_count(const GmmHyperParams& hyper, int dim) {
  const int k = hyper.n_components;
  const int d = dim;
  int cov = 0;
  switch (hyper.kind) {
    case CovarianceKind::full: cov = k * d * (d + 1) / 2; break;
    case CovarianceKind::tied: cov = d * (d + 1) / 2; break;
    case CovarianceKind::diagonal: cov = k * d; break;
    case CovarianceKind::spherical: cov = k; break;
  }
  return (k - 1) + k * d + cov;
}

double bic(const GmmModel& model, const Eigen::MatrixXd& data) {
  const Eigen::Index n = data.rows();
  if (n == 0) throw ArgumentError("bic: empty data");
  const double total_ll = log_likelihood_batch(model, data).sum();
  const int p = free_parameter_count(model.hyper, model.dim());
  return double(p) * std::log(double(n)) - 2.0 * total_ll;
}

std::vector<GmmHyperParams> hyperparameter_grid() {
  std::vector<GmmHyperParams> grid;
  const CovarianceKind kinds[] = {CovarianceKind::full, CovarianceKind::tied,
                                  CovarianceKind::diagonal,
                                  CovarianceKind::spherical};
  const double regs[] = {1e-2, 1e-3, 1e-4, 1e-5};
  for (int k = 1; k <= 5; ++k)
    for (CovarianceKind kind : kinds)
      for (double reg : regs) grid.push_back({k, kind, reg});
  return grid;
}

std::pair<GmmModel, FitReport> select_model(const Eigen::MatrixXd& train,
                                            const Eigen::MatrixXd& validation,
                                            std::uint64_t seed) {
  if (train.rows() == 0 || validation.rows() == 0)
    throw ArgumentError("select_model: empty dataset");

  const auto grid = hyperparameter_grid();
  bool have_best = false;
  GmmModel best;
  FitReport best_report;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    if (grid[cell].n_components > train.rows()) continue;
    auto fit = em_fit(train, grid[cell], seed ^ std::uint64_t(cell));
    if (std::holds_alternative<NonConvergence>(fit)) continue;
    auto& em = std::get<EmResult>(fit);
    const double bic_val = bic(em.model, validation);
    if (!std::isfinite(bic_val)) continue;
    if (!have_best || bic_val < best_report.bic_validation) {
      have_best = true;
      best = std::move(em.model);
      best_report = {em.converged, em.n_iterations, bic(best, train), bic_val};
    }
  }
  if (!have_best)
    throw StateError("select_model: every grid cell failed to converge");
  return {std::move(best), best_report};
}

Eigen::MatrixXd sample(const GmmModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample: n must be >= 1");
  const int k = model.n_components();
  const int d = model.dim();

  // per-component transforms mapping standard normals to the component
  std::vector<Eigen::MatrixXd> transform;
  transform.resize(std::size_t(k));
  for (int c = 0; c < k; ++c) {
    switch (model.hyper.kind) {
      case CovarianceKind::full:
      case CovarianceKind::tied: {
        const Eigen::MatrixXd& cov =
            model.cov_full[model.hyper.kind == CovarianceKind::full
                               ? std::size_t(c)
                               : 0];
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
          throw NumericError("sample: covariance not positive definite");
        transform[std::size_t(c)] = llt.matrixL();
        break;
      }
      case CovarianceKind::diagonal:
        transform[std::size_t(c)] =
            model.cov_diag.row(c).array().sqrt().matrix().asDiagonal();
        break;
      case CovarianceKind::spherical:
        transform[std::size_t(c)] =
            (std::sqrt(model.cov_spherical(c)) *
             Eigen::VectorXd::Ones(d))
                .asDiagonal();
        break;
    }
  }

  Rng rng(seed);
  std::discrete_distribution<int> pick(model.weights.data(),
                                       model.weights.data() + k);
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd z(d);
  for (int i = 0; i < n; ++i) {
    const int c = pick(rng);
    for (int j = 0; j < d; ++j) z(j) = unit(rng);
    out.row(i) =
        model.means.row(c) + (transform[std::size_t(c)] * z).transpose();
  }
  return out;
}

Eigen::MatrixXd component_means(const GmmModel& model) { return model.means; }

}  // namespace gmmil
