#include "gmmil/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace gmmil {

namespace {

constexpr double kLn2 = 0.6931471805599453;

Eigen::MatrixXd component_covariance(const GmmModel& m, int c) {
  const int d = m.dim();
  switch (m.hyper.kind) {
    case CovarianceKind::full: return m.cov_full[std::size_t(c)];
    case CovarianceKind::tied: return m.cov_full[0];
    case CovarianceKind::diagonal:
      return Eigen::MatrixXd(m.cov_diag.row(c).asDiagonal());
    case CovarianceKind::spherical:
      return m.cov_spherical(c) * Eigen::MatrixXd::Identity(d, d);
  }
  throw ArgumentError("unknown covariance kind");
}

}  // namespace

DecisionMap decision_map(const ClassifierSet& set, const GridSpec& grid) {
  if (set.latent_dim() != 2)
    throw ArgumentError("decision_map requires a 2-D latent space");
  if (grid.resolution < 2) throw ArgumentError("decision_map: resolution < 2");

  const int res = grid.resolution;
  Eigen::MatrixXd points(res * res, 2);
  for (int iy = 0; iy < res; ++iy) {
    const double y =
        grid.min_y + (grid.max_y - grid.min_y) * iy / double(res - 1);
    for (int ix = 0; ix < res; ++ix) {
      const double x =
          grid.min_x + (grid.max_x - grid.min_x) * ix / double(res - 1);
      points.row(iy * res + ix) << x, y;
    }
  }

  DecisionMap map;
  map.grid = grid;
  map.predictions = set.predict_batch(points);

  for (int id : set.class_ids()) {
    const GmmModel& m = set.model(id);
    for (int c = 0; c < m.n_components(); ++c) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
          component_covariance(m, c));
      EllipseOverlay e;
      e.class_id = id;
      e.component = c;
      e.center_x = m.means(c, 0);
      e.center_y = m.means(c, 1);
      // eigenvalues ascending; axes drawn at 2 sigma
      e.semi_major = 2.0 * std::sqrt(std::max(0.0, es.eigenvalues()(1)));
      e.semi_minor = 2.0 * std::sqrt(std::max(0.0, es.eigenvalues()(0)));
      e.angle_rad =
          std::atan2(es.eigenvectors()(1, 1), es.eigenvectors()(0, 1));
      map.overlays.push_back(e);
    }
  }
  return map;
}

Eigen::MatrixXd decode_component_means(const GmmModel& model,
                                       const AutoencoderModel& decoder) {
  if (model.dim() != decoder.latent_dim)
    throw ArgumentError("decode_component_means: latent dimension mismatch");
  return decode(decoder, component_means(model));
}

double js_distance(const GmmModel& a, const GmmModel& b, int n_samples,
                   std::uint64_t seed) {
  if (n_samples < 1) throw ArgumentError("js_distance: n_samples < 1");
  if (a.dim() != b.dim())
    throw ArgumentError("js_distance: dimension mismatch");

  // callers may hand over models without a scoring cache
  GmmModel pa = a, pb = b;
  if (pa.log_det.size() != std::size_t(pa.n_components()) && !pa.prepare())
    throw NumericError("js_distance: covariance not positive definite");
  if (pb.log_det.size() != std::size_t(pb.n_components()) && !pb.prepare())
    throw NumericError("js_distance: covariance not positive definite");

  auto half = [&](const GmmModel& p, const GmmModel& q,
                  std::uint64_t s) {
    Eigen::MatrixXd x = sample(p, n_samples, s);
    Eigen::VectorXd lp = log_likelihood_batch(p, x);
    Eigen::VectorXd lq = log_likelihood_batch(q, x);
    // log 0.5(p+q) via log-sum-exp of the two scores
    double acc = 0;
    for (int i = 0; i < n_samples; ++i) {
      const double hi = std::max(lp(i), lq(i));
      const double lm = hi + std::log(0.5 * (std::exp(lp(i) - hi) +
                                             std::exp(lq(i) - hi)));
      acc += lp(i) - lm;
    }
    return acc / double(n_samples);
  };

  const double js = 0.5 * half(pa, pb, derive_seed(seed, 1)) +
                    0.5 * half(pb, pa, derive_seed(seed, 2));
  return std::clamp(js, 0.0, kLn2);
}

DistanceMatrix distance_matrix(const ClassifierSet& set, int n_samples,
                               std::uint64_t seed) {
  const auto ids = set.class_ids();
  if (ids.size() < 2)
    throw ArgumentError("distance_matrix needs at least 2 classes");
  const int c = int(ids.size());
  DistanceMatrix dm;
  dm.class_ids = ids;
  dm.values = Eigen::MatrixXd::Zero(c, c);
  for (int i = 0; i < c; ++i) {
    for (int j = i + 1; j < c; ++j) {
      const std::uint64_t pair_seed =
          derive_seed(seed, std::uint64_t(i) * 1000 + std::uint64_t(j));
      const double d =
          js_distance(set.model(ids[std::size_t(i)]),
                      set.model(ids[std::size_t(j)]), n_samples, pair_seed);
      dm.values(i, j) = d;
      dm.values(j, i) = d;
    }
  }
  return dm;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  if (vx <= 0 || vy <= 0) return 0;
  return cov / std::sqrt(vx * vy);
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& x,
                        const std::vector<double>& y, std::uint64_t seed) {
  if (x.size() != y.size()) throw ArgumentError("spearman: length mismatch");
  if (x.size() < 3) throw ArgumentError("spearman: need at least 3 pairs");

  const std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  SpearmanResult res;
  res.rho = pearson(rx, ry);

  constexpr int kPermutations = 10000;
  Rng rng(seed);
  int at_least = 0;
  std::vector<double> perm = ry;
  for (int p = 0; p < kPermutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    if (std::abs(pearson(rx, perm)) >= std::abs(res.rho)) ++at_least;
  }
  res.p_value = double(at_least + 1) / double(kPermutations + 1);
  return res;
}

void write_pgm(const std::string& path, const Eigen::VectorXd& image) {
  if (image.size() != kImagePixels)
    throw ArgumentError("write_pgm: expected a 784-pixel image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << "P5\n28 28\n255\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image(i), 0.0, 1.0);
    out.put(char(int(std::lround(v * 255.0))));
  }
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace gmmil
