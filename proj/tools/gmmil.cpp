// gmmil command line: model training, encoding, classification and the
// experiment harness.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "../src/binio.hpp"
#include "gmmil/analysis.hpp"
#include "gmmil/experiments.hpp"
#include "gmmil/serialize.hpp"

namespace fs = std::filesystem;
using namespace gmmil;

namespace {

void save_features(const std::string& path, const Eigen::MatrixXd& features,
                   const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  binio::write_magic(out, "GMMIL-FT");
  binio::write_u32(out, 1);
  binio::write_tensor(out, features);
  binio::write_u32(out, std::uint32_t(labels.size()));
  for (int l : labels) binio::write_u32(out, std::uint32_t(l));
}

std::pair<Eigen::MatrixXd, std::vector<int>> load_features(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  binio::check_magic(in, "GMMIL-FT", path);
  if (binio::read_u32(in, path) != 1)
    throw FormatError(path + ": unsupported version");
  Eigen::MatrixXd features = binio::read_matrix(in, path);
  const auto n = binio::read_u32(in, path);
  std::vector<int> labels(n);
  for (auto& l : labels) l = int(binio::read_u32(in, path));
  return {std::move(features), std::move(labels)};
}

Eigen::MatrixXd rows_for_class(const Eigen::MatrixXd& features,
                               const std::vector<int>& labels, int cls) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == cls) idx.push_back(Eigen::Index(i));
  Eigen::MatrixXd out(Eigen::Index(idx.size()), features.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(Eigen::Index(i)) = features.row(idx[i]);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GMM-IL: incremental max-likelihood classifier over a learnt "
               "latent space"};
  app.require_subcommand(1);

  // train-encoder
  auto* train_cmd = app.add_subcommand("train-encoder",
                                       "Train the convolutional autoencoder");
  std::string data_dir, out_path = "encoder.bin", classes_arg = "all";
  int epochs = 40, latent_dim = 100;
  std::uint64_t seed = 7;
  train_cmd->add_option("--data-dir", data_dir)->required();
  train_cmd->add_option("--classes", classes_arg,
                        "comma separated ids or 'all'");
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--latent-dim", latent_dim);
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--out", out_path);

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "Encode an IDX image file");
  std::string model_path, in_images, in_labels, features_out;
  encode_cmd->add_option("--model", model_path)->required();
  encode_cmd->add_option("--in", in_images, "IDX images file")->required();
  encode_cmd->add_option("--labels", in_labels, "IDX labels file")->required();
  encode_cmd->add_option("--out", features_out)->required();

  // fit-gmm
  auto* fit_cmd = app.add_subcommand("fit-gmm",
                                     "Grid-select a GMM for one class");
  int fit_class = 0;
  std::string fit_features, fit_val_features, fit_out;
  fit_cmd->add_option("--class", fit_class)->required();
  fit_cmd->add_option("--features", fit_features)->required();
  fit_cmd->add_option("--val-features", fit_val_features)->required();
  fit_cmd->add_option("--seed", seed);
  fit_cmd->add_option("--out", fit_out)->required();

  // classify
  auto* classify_cmd = app.add_subcommand("classify",
                                          "Classify an IDX image file");
  std::string bundle_dir, classify_images, classify_out;
  classify_cmd->add_option("--bundle", bundle_dir)->required();
  classify_cmd->add_option("--images", classify_images)->required();
  classify_cmd->add_option("--labels", in_labels,
                           "IDX labels file (order check only)");
  classify_cmd->add_option("--out", classify_out)->required();

  // map2d
  auto* map_cmd = app.add_subcommand("map2d",
                                     "2-D decision map for a 2-feature bundle");
  GridSpec grid;
  std::string map_out = "map.csv";
  map_cmd->add_option("--bundle", bundle_dir)->required();
  map_cmd->add_option("--min-x", grid.min_x);
  map_cmd->add_option("--max-x", grid.max_x);
  map_cmd->add_option("--min-y", grid.min_y);
  map_cmd->add_option("--max-y", grid.max_y);
  map_cmd->add_option("--resolution", grid.resolution);
  map_cmd->add_option("--out", map_out);

  // sample-class
  auto* sample_cmd = app.add_subcommand(
      "sample-class", "Sample latents from a class GMM and decode to PGM");
  int sample_class_id = 0, sample_n = 1;
  std::string sample_out_dir = ".";
  sample_cmd->add_option("--bundle", bundle_dir)->required();
  sample_cmd->add_option("--class", sample_class_id)->required();
  sample_cmd->add_option("--n", sample_n)->required();
  sample_cmd->add_option("--seed", seed);
  sample_cmd->add_option("--out-dir", sample_out_dir);

  // distance-matrix
  auto* dist_cmd = app.add_subcommand(
      "distance-matrix", "Pairwise Jensen-Shannon distances between classes");
  int js_samples = 10000;
  std::string dist_out = "distance_matrix.csv";
  dist_cmd->add_option("--bundle", bundle_dir)->required();
  dist_cmd->add_option("--n-samples", js_samples);
  dist_cmd->add_option("--seed", seed);
  dist_cmd->add_option("--out", dist_out);

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment",
                                     "Run one of the benchmark experiments");
  ExperimentConfig cfg;
  exp_cmd->add_option("kind", cfg.kind,
                      "baseline|small-sample|imbalanced|incremental")
      ->required();
  exp_cmd->add_option("--data-dir", cfg.data_dir)->required();
  exp_cmd->add_option("--out", cfg.output_dir)->required();
  exp_cmd->add_option("--seed", cfg.seed);
  exp_cmd->add_option("--seeds", cfg.small_sample_seeds,
                      "seed count for the small-sample sweep");
  exp_cmd->add_flag("--fast", cfg.fast, "reduced settings for smoke runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      LabeledDataset full =
          load_idx((fs::path(data_dir) / "train-images-idx3-ubyte").string(),
                   (fs::path(data_dir) / "train-labels-idx1-ubyte").string());
      auto [train, val] = split_train_val(full, seed);
      if (classes_arg != "all") {
        std::vector<int> classes;
        std::stringstream ss(classes_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) classes.push_back(std::stoi(tok));
        train = filter_classes(train, classes);
      }
      ScheduleSpec schedule;
      schedule.epochs = epochs;
      AutoencoderModel model =
          train_autoencoder(train, schedule, seed, latent_dim);
      save_autoencoder(model, out_path);
      std::cout << "trained on " << train.size() << " images, final MSE "
                << model.loss_history.back() << ", saved " << out_path
                << "\n";
    } else if (*encode_cmd) {
      AutoencoderModel model = load_autoencoder(model_path);
      LabeledDataset ds = load_idx(in_images, in_labels);
      save_features(features_out, encode(model, ds.images), ds.labels);
      std::cout << "encoded " << ds.size() << " images -> " << features_out
                << "\n";
    } else if (*fit_cmd) {
      auto [train_f, train_l] = load_features(fit_features);
      auto [val_f, val_l] = load_features(fit_val_features);
      auto [model, report] =
          select_model(rows_for_class(train_f, train_l, fit_class),
                       rows_for_class(val_f, val_l, fit_class), seed);
      save_gmm(model, fit_class, fit_out);
      std::cout << "class " << fit_class << ": K=" << model.n_components()
                << " kind=" << covariance_kind_name(model.hyper.kind)
                << " reg=" << model.hyper.reg_covar
                << " validation BIC=" << report.bic_validation << "\n";
    } else if (*classify_cmd) {
      ClassifierBundle bundle = load_bundle(bundle_dir);
      AutoencoderModel encoder = load_autoencoder(bundle.encoder_file);
      LabeledDataset ds =
          in_labels.empty()
              ? LabeledDataset{}
              : load_idx(classify_images, in_labels, Split::test);
      if (in_labels.empty()) throw ArgumentError("--labels required");
      Eigen::MatrixXd feats = encode(encoder, ds.images);
      Eigen::MatrixXd scores = bundle.set.score_batch(feats);
      std::vector<int> preds = bundle.set.predict_batch(feats);
      std::ofstream out(classify_out);
      out << "index,predicted";
      for (int id : bundle.set.class_ids()) out << ",loglik_" << id;
      out << "\n";
      for (Eigen::Index i = 0; i < feats.rows(); ++i) {
        out << i << ',' << preds[std::size_t(i)];
        for (Eigen::Index c = 0; c < scores.cols(); ++c)
          out << ',' << scores(i, c);
        out << "\n";
      }
      std::cout << "wrote " << classify_out << "\n";
    } else if (*map_cmd) {
      ClassifierBundle bundle = load_bundle(bundle_dir);
      DecisionMap map = decision_map(bundle.set, grid);
      std::ofstream out(map_out);
      out << "x,y,predicted\n";
      const int res = grid.resolution;
      for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix) {
          const double x =
              grid.min_x + (grid.max_x - grid.min_x) * ix / double(res - 1);
          const double y =
              grid.min_y + (grid.max_y - grid.min_y) * iy / double(res - 1);
          out << x << ',' << y << ','
              << map.predictions[std::size_t(iy * res + ix)] << "\n";
        }
      std::ofstream overlay(fs::path(map_out).replace_extension(".overlays.csv"));
      overlay << "class,component,center_x,center_y,semi_major,semi_minor,"
                 "angle_rad\n";
      for (const auto& e : map.overlays)
        overlay << e.class_id << ',' << e.component << ',' << e.center_x << ','
                << e.center_y << ',' << e.semi_major << ',' << e.semi_minor
                << ',' << e.angle_rad << "\n";
      std::cout << "wrote " << map_out << "\n";
    } else if (*sample_cmd) {
      ClassifierBundle bundle = load_bundle(bundle_dir);
      AutoencoderModel decoder = load_autoencoder(bundle.encoder_file);
      Eigen::MatrixXd latents =
          sample(bundle.set.model(sample_class_id), sample_n, seed);
      Eigen::MatrixXd images = decode(decoder, latents);
      fs::create_directories(sample_out_dir);
      for (int i = 0; i < sample_n; ++i)
        write_pgm((fs::path(sample_out_dir) /
                   ("class" + std::to_string(sample_class_id) + "_sample" +
                    std::to_string(i) + ".pgm"))
                      .string(),
                  images.row(i).transpose());
      std::cout << "wrote " << sample_n << " samples to " << sample_out_dir
                << "\n";
    } else if (*dist_cmd) {
      ClassifierBundle bundle = load_bundle(bundle_dir);
      DistanceMatrix dm = distance_matrix(bundle.set, js_samples, seed);
      std::ofstream out(dist_out);
      out << "class";
      for (int id : dm.class_ids) out << ',' << id;
      out << "\n";
      for (int r = 0; r < int(dm.class_ids.size()); ++r) {
        out << dm.class_ids[std::size_t(r)];
        for (int c = 0; c < int(dm.class_ids.size()); ++c)
          out << ',' << dm.values(r, c);
        out << "\n";
      }
      std::cout << "wrote " << dist_out << "\n";
    } else if (*exp_cmd) {
      run_experiment(cfg);
      std::cout << "wrote " << (fs::path(cfg.output_dir) / "results.csv")
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
