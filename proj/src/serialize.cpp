#include "gmmil/serialize.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "binio.hpp"

namespace gmmil {

namespace fs = std::filesystem;
using nlohmann::json;

void save_gmm(const GmmModel& model, int class_id, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  binio::write_magic(out, "GMMIL-GMM");
  binio::write_u32(out, 1);  // format version
  binio::write_u32(out, std::uint32_t(class_id));
  binio::write_u32(out, std::uint32_t(model.hyper.n_components));
  binio::write_u32(out, std::uint32_t(model.hyper.kind));
  binio::write_f64(out, model.hyper.reg_covar);
  binio::write_f64(out, model.train_log_likelihood);
  binio::write_tensor(out, model.weights);
  binio::write_tensor(out, model.means);
  switch (model.hyper.kind) {
    case CovarianceKind::full:
    case CovarianceKind::tied:
      for (const auto& cov : model.cov_full) binio::write_tensor(out, cov);
      break;
    case CovarianceKind::diagonal:
      binio::write_tensor(out, model.cov_diag);
      break;
    case CovarianceKind::spherical:
      binio::write_tensor(out, model.cov_spherical);
      break;
  }
  if (!out) throw FormatError(path + ": write failed");
}

std::pair<GmmModel, int> load_gmm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  binio::check_magic(in, "GMMIL-GMM", path);
  const auto version = binio::read_u32(in, path);
  if (version != 1)
    throw FormatError(path + ": unsupported version " +
                      std::to_string(version));
  const int class_id = int(binio::read_u32(in, path));
  GmmModel m;
  m.hyper.n_components = int(binio::read_u32(in, path));
  const auto kind = binio::read_u32(in, path);
  if (kind > 3) throw FormatError(path + ": bad covariance kind");
  m.hyper.kind = CovarianceKind(kind);
  m.hyper.reg_covar = binio::read_f64(in, path);
  m.train_log_likelihood = binio::read_f64(in, path);
  m.weights = binio::read_vector(in, path);
  m.means = binio::read_matrix(in, path);
  switch (m.hyper.kind) {
    case CovarianceKind::full:
      for (int c = 0; c < m.hyper.n_components; ++c)
        m.cov_full.push_back(binio::read_matrix(in, path));
      break;
    case CovarianceKind::tied:
      m.cov_full.push_back(binio::read_matrix(in, path));
      break;
    case CovarianceKind::diagonal:
      m.cov_diag = binio::read_matrix(in, path);
      break;
    case CovarianceKind::spherical:
      m.cov_spherical = binio::read_vector(in, path);
      break;
  }
  if (!m.prepare())
    throw FormatError(path + ": covariance not positive definite");
  return {std::move(m), class_id};
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  std::uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  return h;
}

void save_bundle(const ClassifierSet& set, const std::string& dir,
                 const std::string& encoder_path) {
  fs::create_directories(dir);
  json manifest;
  manifest["encoder_file"] = fs::path(encoder_path).filename().string();
  manifest["encoder_hash"] = file_hash(encoder_path);
  json classes = json::array();
  for (int id : set.class_ids()) {
    const std::string file = "gmm_" + std::to_string(id) + ".bin";
    save_gmm(set.model(id), id, (fs::path(dir) / file).string());
    classes.push_back({{"id", id}, {"file", file}});
  }
  manifest["classes"] = classes;
  const fs::path enc_dst =
      fs::path(dir) / manifest["encoder_file"].get<std::string>();
  if (!fs::exists(enc_dst) || !fs::equivalent(enc_dst, encoder_path))
    fs::copy_file(encoder_path, enc_dst, fs::copy_options::overwrite_existing);
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw FormatError(dir + "/manifest.json: write failed");
}

ClassifierBundle load_bundle(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw FormatError(dir + "/manifest.json: cannot open");
  json manifest = json::parse(in);

  ClassifierBundle bundle;
  bundle.encoder_file = (fs::path(dir) / manifest["encoder_file"]
                                             .get<std::string>())
                            .string();
  bundle.encoder_hash = manifest["encoder_hash"].get<std::uint64_t>();
  if (file_hash(bundle.encoder_file) != bundle.encoder_hash)
    throw ConsistencyError(dir + ": encoder hash mismatch, bundle was built "
                                 "against a different latent space");
  for (const auto& entry : manifest["classes"]) {
    auto [model, id] =
        load_gmm((fs::path(dir) / entry["file"].get<std::string>()).string());
    if (id != entry["id"].get<int>())
      throw ConsistencyError(dir + ": manifest/file class id mismatch");
    bundle.set = bundle.set.add_class(id, std::move(model));
  }
  return bundle;
}

}  // namespace gmmil
