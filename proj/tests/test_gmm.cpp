#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <variant>
#include <vector>

#include "gmmil/gmm.hpp"

using namespace gmmil;

namespace {

constexpr double kPi = 3.14159265358979323846;

GmmModel std_normal_1d() {
  GmmModel m;
  m.hyper = {1, CovarianceKind::full, 0.0};
  m.weights = Eigen::VectorXd::Ones(1);
  m.means = Eigen::MatrixXd::Zero(1, 1);
  m.cov_full = {Eigen::MatrixXd::Identity(1, 1)};
  REQUIRE(m.prepare());
  return m;
}

GmmModel spherical_2d_unit(double mean_x = 0, double mean_y = 0) {
  GmmModel m;
  m.hyper = {1, CovarianceKind::spherical, 0.0};
  m.weights = Eigen::VectorXd::Ones(1);
  m.means = Eigen::MatrixXd(1, 2);
  m.means << mean_x, mean_y;
  m.cov_spherical = Eigen::VectorXd::Ones(1);
  REQUIRE(m.prepare());
  return m;
}

Eigen::MatrixXd gaussian_blob(Rng& rng, int n, const Eigen::VectorXd& mean,
                              double sigma) {
  std::normal_distribution<double> nd(0, sigma);
  Eigen::MatrixXd out(n, mean.size());
  for (int i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < mean.size(); ++j)
      out(i, j) = mean(j) + nd(rng);
  return out;
}

// naive direct-density evaluation, no log-sum-exp
double naive_density(const GmmModel& m, const Eigen::VectorXd& x) {
  const int d = m.dim();
  double total = 0;
  for (int k = 0; k < m.n_components(); ++k) {
    Eigen::MatrixXd cov;
    switch (m.hyper.kind) {
      case CovarianceKind::full:
        cov = m.cov_full[std::size_t(k)];
        break;
      case CovarianceKind::tied:
        cov = m.cov_full[0];
        break;
      case CovarianceKind::diagonal:
        cov = m.cov_diag.row(k).asDiagonal();
        break;
      case CovarianceKind::spherical:
        cov = m.cov_spherical(k) * Eigen::MatrixXd::Identity(d, d);
        break;
    }
    const Eigen::VectorXd diff = x - m.means.row(k).transpose();
    const double quad = diff.dot(cov.inverse() * diff);
    const double norm =
        std::pow(2 * kPi, -0.5 * d) / std::sqrt(cov.determinant());
    total += m.weights(k) * norm * std::exp(-0.5 * quad);
  }
  return total;
}

int naive_free_params(const GmmHyperParams& h, int d) {
  const int k = h.n_components;
  int cov = 0;
  switch (h.kind) {
    case CovarianceKind::full: cov = k * d * (d + 1) / 2; break;
    case CovarianceKind::tied: cov = d * (d + 1) / 2; break;
    case CovarianceKind::diagonal: cov = k * d; break;
    case CovarianceKind::spherical: cov = k; break;
  }
  return (k - 1) + k * d + cov;
}

GmmModel random_model(Rng& rng, int k, int d, CovarianceKind kind) {
  GmmModel m;
  m.hyper = {k, kind, 0.0};
  std::uniform_real_distribution<double> u(0.2, 1.0);
  m.weights = Eigen::VectorXd(k);
  for (int i = 0; i < k; ++i) m.weights(i) = u(rng);
  m.weights /= m.weights.sum();
  m.means = Eigen::MatrixXd(k, d);
  std::normal_distribution<double> nd(0, 3);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) m.means(i, j) = nd(rng);
  if (kind == CovarianceKind::full || kind == CovarianceKind::tied) {
    const int count = kind == CovarianceKind::full ? k : 1;
    m.cov_full.clear();
    for (int i = 0; i < count; ++i) {
      Eigen::MatrixXd a(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = nd(rng);
      m.cov_full.push_back(a * a.transpose() +
                           0.5 * Eigen::MatrixXd::Identity(d, d));
    }
  } else if (kind == CovarianceKind::diagonal) {
    m.cov_diag = Eigen::MatrixXd(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) m.cov_diag(i, j) = u(rng) + 0.3;
  } else {
    m.cov_spherical = Eigen::VectorXd(k);
    for (int i = 0; i < k; ++i) m.cov_spherical(i) = u(rng) + 0.3;
  }
  REQUIRE(m.prepare());
  return m;
}

}  // namespace

TEST_CASE("kmeans K=1 returns the sample mean") {
  Rng rng(1);
  Eigen::MatrixXd data = gaussian_blob(rng, 60, Eigen::Vector2d(3, -2), 1.0);
  KMeansResult r = kmeans_init(data, 1, 7);
  const Eigen::VectorXd mean = data.colwise().mean();
  CHECK((r.centers.row(0).transpose() - mean).norm() < 1e-10);
  for (int a : r.assignment) CHECK(a == 0);
}

TEST_CASE("kmeans with K equal to point count hits every point") {
  Eigen::MatrixXd data(4, 2);
  data << 0, 0, 10, 0, 0, 10, 10, 10;
  KMeansResult r = kmeans_init(data, 4, 3);
  // zero distortion: every point sits on its centroid
  for (int i = 0; i < 4; ++i) {
    const int c = r.assignment[std::size_t(i)];
    CHECK((data.row(i) - r.centers.row(c)).norm() < 1e-12);
  }
}

TEST_CASE("kmeans two separated blobs recovers the blob means") {
  Rng rng(5);
  Eigen::MatrixXd a = gaussian_blob(rng, 100, Eigen::Vector2d(-5, 0), 0.3);
  Eigen::MatrixXd b = gaussian_blob(rng, 100, Eigen::Vector2d(5, 0), 0.3);
  Eigen::MatrixXd data(200, 2);
  data << a, b;
  KMeansResult r = kmeans_init(data, 2, 11);
  const double d0 = std::min((r.centers.row(0) - Eigen::RowVector2d(-5, 0)).norm(),
                             (r.centers.row(0) - Eigen::RowVector2d(5, 0)).norm());
  const double d1 = std::min((r.centers.row(1) - Eigen::RowVector2d(-5, 0)).norm(),
                             (r.centers.row(1) - Eigen::RowVector2d(5, 0)).norm());
  CHECK(d0 < 0.1);
  CHECK(d1 < 0.1);
  // the two centers must pick different blobs
  CHECK((r.centers.row(0) - r.centers.row(1)).norm() > 5.0);
}

TEST_CASE("kmeans rejects more clusters than points") {
  Eigen::MatrixXd data(3, 2);
  data.setRandom();
  CHECK_THROWS_AS(kmeans_init(data, 4, 1), CapacityError);
}

TEST_CASE("em K=1 equals the closed-form MLE for every covariance kind") {
  Rng rng(21);
  Eigen::MatrixXd data = gaussian_blob(rng, 80, Eigen::Vector3d(1, -1, 2), 1.5);
  const Eigen::VectorXd mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(data.rows());
  const double reg = 1e-4;

  for (CovarianceKind kind :
       {CovarianceKind::full, CovarianceKind::tied, CovarianceKind::diagonal,
        CovarianceKind::spherical}) {
    CAPTURE(covariance_kind_name(kind));
    auto result = em_fit(data, {1, kind, reg}, 3);
    REQUIRE(std::holds_alternative<EmResult>(result));
    const GmmModel& m = std::get<EmResult>(result).model;
    CHECK((m.means.row(0).transpose() - mean).norm() < 1e-9);
    CHECK(m.weights(0) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd expected =
        cov + reg * Eigen::MatrixXd::Identity(3, 3);
    switch (kind) {
      case CovarianceKind::full:
      case CovarianceKind::tied:
        CHECK((m.cov_full[0] - expected).norm() < 1e-9);
        break;
      case CovarianceKind::diagonal:
        CHECK((m.cov_diag.row(0).transpose() -
               Eigen::VectorXd(expected.diagonal())).norm() < 1e-9);
        break;
      case CovarianceKind::spherical:
        // spherical MLE: mean of the per-dimension variances
        CHECK(m.cov_spherical(0) ==
              doctest::Approx(expected.diagonal().mean()).epsilon(1e-9));
        break;
    }
  }
}

TEST_CASE("em recovers two separated 2-D Gaussians") {
  Rng rng(31);
  Eigen::MatrixXd a = gaussian_blob(rng, 200, Eigen::Vector2d(-4, 1), 0.5);
  Eigen::MatrixXd b = gaussian_blob(rng, 200, Eigen::Vector2d(4, -1), 0.5);
  Eigen::MatrixXd data(400, 2);
  data << a, b;
  auto result = em_fit(data, {2, CovarianceKind::full, 1e-5}, 9);
  REQUIRE(std::holds_alternative<EmResult>(result));
  const GmmModel& m = std::get<EmResult>(result).model;
  int ia = (m.means(0, 0) < 0) ? 0 : 1;
  CHECK((m.means.row(ia) - Eigen::RowVector2d(-4, 1)).norm() < 0.1);
  CHECK((m.means.row(1 - ia) - Eigen::RowVector2d(4, -1)).norm() < 0.1);
  CHECK(m.weights(0) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("em log-likelihood history is nondecreasing on random instances") {
  Rng rng(77);
  const auto grid = hyperparameter_grid();
  std::normal_distribution<double> nd(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + int(rng() % 3);
    const int n = 40 + int(rng() % 60);
    Eigen::MatrixXd data(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        data(i, j) = nd(rng) + double(i % 3) * 2.0;
    const GmmHyperParams hyper = grid[rng() % grid.size()];
    auto result = em_fit(data, hyper, rng());
    if (!std::holds_alternative<EmResult>(result)) continue;
    const auto& hist = std::get<EmResult>(result).log_likelihood_history;
    for (std::size_t i = 1; i < hist.size(); ++i) {
      CAPTURE(trial);
      CHECK(hist[i] >= hist[i - 1] - 1e-8 * std::abs(hist[i - 1]));
    }
  }
}

TEST_CASE("responsibilities derived from weighted_log_prob are row-normalized") {
  Rng rng(13);
  Eigen::MatrixXd data = gaussian_blob(rng, 50, Eigen::Vector2d(0, 0), 2.0);
  auto result = em_fit(data, {3, CovarianceKind::full, 1e-3}, 4);
  REQUIRE(std::holds_alternative<EmResult>(result));
  const GmmModel& m = std::get<EmResult>(result).model;
  Eigen::MatrixXd wlp = weighted_log_prob(m, data);
  Eigen::VectorXd ll = log_likelihood_batch(m, data);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double sum = (wlp.row(i).array() - ll(i)).exp().sum();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("log density closed forms") {
  GmmModel m1 = std_normal_1d();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  CHECK(log_likelihood(m1, x0) ==
        doctest::Approx(-0.5 * std::log(2 * kPi)).epsilon(1e-12));
  CHECK(log_likelihood(m1, x0) == doctest::Approx(-0.91894).epsilon(1e-4));

  GmmModel m2 = spherical_2d_unit();
  CHECK(log_likelihood(m2, Eigen::Vector2d(0, 0)) ==
        doctest::Approx(-std::log(2 * kPi)).epsilon(1e-12));
  CHECK(log_likelihood(m2, Eigen::Vector2d(0, 0)) ==
        doctest::Approx(-1.83788).epsilon(1e-4));

  Eigen::VectorXd wrong = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(log_likelihood(m2, wrong), ArgumentError);
}

TEST_CASE("two-component 1-D mixture matches direct density sum to 1e-12") {
  GmmModel m;
  m.hyper = {2, CovarianceKind::full, 0.0};
  m.weights = Eigen::VectorXd::Constant(2, 0.5);
  m.means = Eigen::MatrixXd(2, 1);
  m.means << -1.0, 2.0;
  m.cov_full = {Eigen::MatrixXd::Constant(1, 1, 0.7),
                Eigen::MatrixXd::Constant(1, 1, 1.3)};
  REQUIRE(m.prepare());
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0}) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x);
    CHECK(log_likelihood(m, v) ==
          doctest::Approx(std::log(naive_density(m, v))).epsilon(1e-12));
  }
}

TEST_CASE("log_likelihood matches naive density on random models") {
  Rng rng(55);
  for (CovarianceKind kind :
       {CovarianceKind::full, CovarianceKind::tied, CovarianceKind::diagonal,
        CovarianceKind::spherical}) {
    GmmModel m = random_model(rng, 3, 3, kind);
    std::normal_distribution<double> nd(0, 2);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd x(3);
      for (int j = 0; j < 3; ++j) x(j) = nd(rng);
      const double naive = naive_density(m, x);
      if (naive < 1e-280) continue;  // avoid underflow in the naive form
      CHECK(log_likelihood(m, x) ==
            doctest::Approx(std::log(naive)).epsilon(1e-10));
    }
  }
}

TEST_CASE("free parameter counts per covariance kind") {
  CHECK(free_parameter_count({3, CovarianceKind::full, 0}, 4) ==
        2 + 12 + 3 * 10);
  CHECK(free_parameter_count({3, CovarianceKind::tied, 0}, 4) == 2 + 12 + 10);
  CHECK(free_parameter_count({3, CovarianceKind::diagonal, 0}, 4) ==
        2 + 12 + 12);
  CHECK(free_parameter_count({3, CovarianceKind::spherical, 0}, 4) ==
        2 + 12 + 3);
}

TEST_CASE("bic matches an independent oracle on random models") {
  Rng rng(101);
  const CovarianceKind kinds[] = {CovarianceKind::full, CovarianceKind::tied,
                                  CovarianceKind::diagonal,
                                  CovarianceKind::spherical};
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + int(rng() % 4);
    const int d = 2 + int(rng() % 3);
    GmmModel m = random_model(rng, k, d, kinds[trial % 4]);
    Eigen::MatrixXd data = gaussian_blob(
        rng, 30 + int(rng() % 50), Eigen::VectorXd::Zero(d), 2.0);
    double ll = 0;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      ll += log_likelihood(m, data.row(i).transpose());
    const double expected =
        naive_free_params(m.hyper, d) * std::log(double(data.rows())) - 2 * ll;
    CHECK(bic(m, data) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("bic on a single datum at the mean reduces to -2L") {
  GmmModel m = std_normal_1d();
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(1, 1);
  CHECK(bic(m, data) ==
        doctest::Approx(2 * 0.5 * std::log(2 * kPi)).epsilon(1e-12));
}

TEST_CASE("bic prefers the true K over K+3 on separated data") {
  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(std::uint64_t(seed) * 17 + 1);
    Eigen::MatrixXd a = gaussian_blob(rng, 100, Eigen::Vector2d(-6, 0), 0.5);
    Eigen::MatrixXd b = gaussian_blob(rng, 100, Eigen::Vector2d(6, 0), 0.5);
    Eigen::MatrixXd data(200, 2);
    data << a, b;
    auto r2 = em_fit(data, {2, CovarianceKind::full, 1e-4}, std::uint64_t(seed));
    auto r5 = em_fit(data, {5, CovarianceKind::full, 1e-4}, std::uint64_t(seed));
    if (!std::holds_alternative<EmResult>(r2) ||
        !std::holds_alternative<EmResult>(r5))
      continue;
    if (bic(std::get<EmResult>(r2).model, data) <
        bic(std::get<EmResult>(r5).model, data))
      ++wins;
  }
  CHECK(wins > 10);
}

TEST_CASE("hyperparameter grid enumerates 80 cells in tie-break order") {
  const auto grid = hyperparameter_grid();
  REQUIRE(grid.size() == 80);
  CHECK(grid[0].n_components == 1);
  CHECK(grid[0].kind == CovarianceKind::full);
  CHECK(grid[0].reg_covar == doctest::Approx(1e-2));
  CHECK(grid[1].reg_covar == doctest::Approx(1e-3));
  CHECK(grid[4].kind == CovarianceKind::tied);
  CHECK(grid[16].n_components == 2);
  CHECK(grid[79].n_components == 5);
  CHECK(grid[79].kind == CovarianceKind::spherical);
  CHECK(grid[79].reg_covar == doctest::Approx(1e-5));
  // components ascending, then kind, then reg descending
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto& p = grid[i - 1];
    const auto& q = grid[i];
    const bool ordered =
        p.n_components < q.n_components ||
        (p.n_components == q.n_components &&
         (int(p.kind) < int(q.kind) ||
          (p.kind == q.kind && p.reg_covar > q.reg_covar)));
    CHECK(ordered);
  }
}

TEST_CASE("select_model output is the exact argmin over converged candidates") {
  Rng rng(404);
  Eigen::MatrixXd a = gaussian_blob(rng, 60, Eigen::Vector2d(-3, 0), 0.8);
  Eigen::MatrixXd b = gaussian_blob(rng, 60, Eigen::Vector2d(3, 0), 0.8);
  Eigen::MatrixXd train(120, 2);
  train << a, b;
  Eigen::MatrixXd val = gaussian_blob(rng, 40, Eigen::Vector2d(-3, 0), 0.8);

  const std::uint64_t seed = 2024;
  auto [model, report] = select_model(train, val, seed);

  // independently refit every cell and track the best validation BIC
  const auto grid = hyperparameter_grid();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto r = em_fit(train, grid[i], seed ^ std::uint64_t(i));
    if (!std::holds_alternative<EmResult>(r)) continue;
    best = std::min(best, bic(std::get<EmResult>(r).model, val));
  }
  CHECK(report.bic_validation == doctest::Approx(best).epsilon(1e-9));
  CHECK(bic(model, val) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("select_model finds 3 components on synthetic 3-blob data") {
  int correct = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(std::uint64_t(seed) + 900);
    Eigen::MatrixXd a = gaussian_blob(rng, 80, Eigen::Vector2d(-8, 0), 0.5);
    Eigen::MatrixXd b = gaussian_blob(rng, 80, Eigen::Vector2d(0, 8), 0.5);
    Eigen::MatrixXd c = gaussian_blob(rng, 80, Eigen::Vector2d(8, 0), 0.5);
    Eigen::MatrixXd train(240, 2);
    train << a, b, c;
    Eigen::MatrixXd va = gaussian_blob(rng, 30, Eigen::Vector2d(-8, 0), 0.5);
    Eigen::MatrixXd vb = gaussian_blob(rng, 30, Eigen::Vector2d(0, 8), 0.5);
    Eigen::MatrixXd vc = gaussian_blob(rng, 30, Eigen::Vector2d(8, 0), 0.5);
    Eigen::MatrixXd val(90, 2);
    val << va, vb, vc;
    auto [model, report] = select_model(train, val, std::uint64_t(seed));
    if (model.n_components() == 3) ++correct;
  }
  CHECK(correct > 10);
}

TEST_CASE("sampling moments match the model") {
  GmmModel m = std_normal_1d();
  Eigen::MatrixXd s = sample(m, 10000, 31337);
  CHECK(std::abs(s.col(0).mean()) < 0.05);
  const double var =
      (s.col(0).array() - s.col(0).mean()).square().sum() / double(s.rows());
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("sampling concentrates for a near-degenerate spherical component") {
  GmmModel m;
  m.hyper = {1, CovarianceKind::spherical, 0.0};
  m.weights = Eigen::VectorXd::Ones(1);
  m.means = Eigen::MatrixXd(1, 2);
  m.means << 3.0, -1.0;
  m.cov_spherical = Eigen::VectorXd::Constant(1, 1e-12);
  REQUIRE(m.prepare());
  Eigen::MatrixXd s = sample(m, 200, 5);
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    CHECK((s.row(i) - m.means.row(0)).norm() < 1e-4);
}

TEST_CASE("sampling component frequencies follow the mixture weights") {
  GmmModel m;
  m.hyper = {2, CovarianceKind::spherical, 0.0};
  m.weights = Eigen::VectorXd(2);
  m.weights << 0.3, 0.7;
  m.means = Eigen::MatrixXd(2, 1);
  m.means << -100.0, 100.0;  // unambiguous attribution
  m.cov_spherical = Eigen::VectorXd::Ones(2);
  REQUIRE(m.prepare());
  const int n = 10000;
  Eigen::MatrixXd s = sample(m, n, 44);
  int low = 0;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    if (s(i, 0) < 0) ++low;
  const double sd = std::sqrt(0.3 * 0.7 * n);
  CHECK(std::abs(low - 0.3 * n) < 3 * sd);
}

TEST_CASE("fitted density integrates to 1 in 1-D and 2-D") {
  Rng rng(808);
  {
    Eigen::MatrixXd data = gaussian_blob(rng, 300, Eigen::VectorXd::Ones(1), 1.2);
    auto r = em_fit(data, {2, CovarianceKind::full, 1e-4}, 6);
    REQUIRE(std::holds_alternative<EmResult>(r));
    const GmmModel& m = std::get<EmResult>(r).model;
    const double lo = -14, hi = 16, h = 0.01;
    double integral = 0;
    for (double x = lo; x < hi; x += h) {
      Eigen::VectorXd v = Eigen::VectorXd::Constant(1, x + h / 2);
      integral += std::exp(log_likelihood(m, v)) * h;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-2));
  }
  {
    Eigen::MatrixXd data = gaussian_blob(rng, 300, Eigen::Vector2d(0, 0), 1.0);
    auto r = em_fit(data, {2, CovarianceKind::diagonal, 1e-4}, 6);
    REQUIRE(std::holds_alternative<EmResult>(r));
    const GmmModel& m = std::get<EmResult>(r).model;
    const double lo = -10, hi = 10, h = 0.05;
    double integral = 0;
    for (double x = lo; x < hi; x += h)
      for (double y = lo; y < hi; y += h)
        integral += std::exp(log_likelihood(
                        m, Eigen::Vector2d(x + h / 2, y + h / 2))) * h * h;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("component_means returns stored means bitwise") {
  Rng rng(3);
  GmmModel m = random_model(rng, 2, 4, CovarianceKind::full);
  Eigen::MatrixXd means = component_means(m);
  REQUIRE(means.rows() == 2);
  CHECK(means == m.means);
}

TEST_CASE("em rejects non-finite input") {
  Eigen::MatrixXd data = Eigen::MatrixXd::Zero(10, 2);
  data(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(em_fit(data, {1, CovarianceKind::full, 1e-3}, 1),
                  ArgumentError);
}

TEST_CASE("covariance kind names round-trip") {
  for (CovarianceKind kind :
       {CovarianceKind::full, CovarianceKind::tied, CovarianceKind::diagonal,
        CovarianceKind::spherical})
    CHECK(covariance_kind_from_name(covariance_kind_name(kind)) == kind);
  CHECK_THROWS_AS(covariance_kind_from_name("banana"), ArgumentError);
}
