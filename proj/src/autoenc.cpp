#include "gmmil/autoenc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binio.hpp"

namespace gmmil {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kEncodeChunk = 512;

Eigen::MatrixXd relu(const Eigen::MatrixXd& a) { return a.cwiseMax(0.0); }

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

// per-channel sums over a (y, x, channel) activation block
Eigen::VectorXd channel_sums(const Eigen::MatrixXd& a, int channels) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(channels);
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    out(i % channels) += a.col(i).sum();
  return out;
}

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, double fan_in,
                       double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  return m;
}

}  // namespace

double cosine_lr(const ScheduleSpec& spec, double update_pos) {
  if (update_pos < 0) throw ArgumentError("cosine_lr: negative position");
  if (update_pos <= spec.warmup_steps)
    return spec.base_lr * update_pos / double(spec.warmup_steps);
  if (update_pos >= spec.max_updates) return spec.final_lr;
  const double t = (update_pos - spec.warmup_steps) /
                   double(spec.max_updates - spec.warmup_steps);
  return spec.final_lr +
         0.5 * (spec.base_lr - spec.final_lr) * (1.0 + std::cos(kPi * t));
}

AutoencoderModel AutoencoderModel::init(int latent_dim, std::uint64_t seed) {
  if (latent_dim < 1) throw ArgumentError("latent_dim must be >= 1");
  AutoencoderModel m;
  m.latent_dim = latent_dim;
  Rng rng(seed);
  m.conv1_w = glorot(9, 32, 9, 9 * 32, rng);
  m.conv1_b = Eigen::VectorXd::Zero(32);
  m.conv2_w = glorot(288, 64, 288, 9 * 64, rng);
  m.conv2_b = Eigen::VectorXd::Zero(64);
  m.enc_w = glorot(3136, latent_dim, 3136, latent_dim, rng);
  m.enc_b = Eigen::VectorXd::Zero(latent_dim);
  m.dec_w = glorot(latent_dim, 3136, latent_dim, 3136, rng);
  m.dec_b = Eigen::VectorXd::Zero(3136);
  m.deconv1_w = glorot(288, 64, 9 * 64, 288, rng);
  m.deconv1_b = Eigen::VectorXd::Zero(32);
  m.deconv2_w = glorot(9, 32, 9 * 32, 9, rng);
  m.deconv2_b = Eigen::VectorXd::Zero(1);
  return m;
}

namespace {

struct ForwardCache {
  Eigen::MatrixXd a1, h1, a2, h2, z, a3, h3, a4, h4, a5, y;
};

void forward(const AutoencoderModel& m, const Eigen::MatrixXd& x,
             ForwardCache& c) {
  const ConvGeom g1 = AutoencoderModel::geom1();
  const ConvGeom g2 = AutoencoderModel::geom2();
  c.a1 = conv_forward(x, g1, m.conv1_w, m.conv1_b);
  c.h1 = relu(c.a1);
  c.a2 = conv_forward(c.h1, g2, m.conv2_w, m.conv2_b);
  c.h2 = relu(c.a2);
  c.z = (c.h2 * m.enc_w).rowwise() + m.enc_b.transpose();
  c.a3 = (c.z * m.dec_w).rowwise() + m.dec_b.transpose();
  c.h3 = relu(c.a3);
  c.a4 = conv_backward_input(c.h3, g2, m.deconv1_w);
  for (Eigen::Index i = 0; i < c.a4.cols(); ++i)
    c.a4.col(i).array() += m.deconv1_b(i % 32);
  c.h4 = relu(c.a4);
  c.a5 = conv_backward_input(c.h4, g1, m.deconv2_w).array() + m.deconv2_b(0);
  c.y = sigmoid(c.a5);
}

struct Gradients {
  Eigen::MatrixXd conv1_w, conv2_w, enc_w, dec_w, deconv1_w, deconv2_w;
  Eigen::VectorXd conv1_b, conv2_b, enc_b, dec_b, deconv1_b, deconv2_b;
};

// dy is dL/d(output); fills all parameter gradients
void backward(const AutoencoderModel& m, const Eigen::MatrixXd& x,
              const ForwardCache& c, const Eigen::MatrixXd& dy, Gradients& g) {
  const ConvGeom g1 = AutoencoderModel::geom1();
  const ConvGeom g2 = AutoencoderModel::geom2();
  const Eigen::VectorXd zero32 = Eigen::VectorXd::Zero(32);
  const Eigen::VectorXd zero64 = Eigen::VectorXd::Zero(64);

  Eigen::VectorXd scratch;
  Eigen::MatrixXd da5 =
      dy.array() * c.y.array() * (1.0 - c.y.array());  // sigmoid'
  g.deconv2_b = channel_sums(da5, 1);
  // transposed-conv weight grads reuse the conv primitive with the roles of
  // input and output swapped; the db it returns belongs to the conv
  // direction and is discarded
  conv_backward_weights(da5, c.h4, g1, g.deconv2_w, scratch);
  Eigen::MatrixXd dh4 = conv_forward(da5, g1, m.deconv2_w, zero32);

  Eigen::MatrixXd da4 = (c.a4.array() > 0).select(dh4, 0.0);
  g.deconv1_b = channel_sums(da4, 32);
  conv_backward_weights(da4, c.h3, g2, g.deconv1_w, scratch);
  Eigen::MatrixXd dh3 = conv_forward(da4, g2, m.deconv1_w, zero64);

  Eigen::MatrixXd da3 = (c.a3.array() > 0).select(dh3, 0.0);
  g.dec_w.noalias() = c.z.transpose() * da3;
  g.dec_b = da3.colwise().sum();
  Eigen::MatrixXd dz = da3 * m.dec_w.transpose();

  g.enc_w.noalias() = c.h2.transpose() * dz;
  g.enc_b = dz.colwise().sum();
  Eigen::MatrixXd dh2 = dz * m.enc_w.transpose();

  Eigen::MatrixXd da2 = (c.a2.array() > 0).select(dh2, 0.0);
  conv_backward_weights(c.h1, da2, g2, g.conv2_w, g.conv2_b);
  Eigen::MatrixXd dh1 = conv_backward_input(da2, g2, m.conv2_w);

  Eigen::MatrixXd da1 = (c.a1.array() > 0).select(dh1, 0.0);
  conv_backward_weights(x, da1, g1, g.conv1_w, g.conv1_b);
}

std::vector<Eigen::Map<Eigen::ArrayXd>> parameter_views(AutoencoderModel& m) {
  std::vector<Eigen::Map<Eigen::ArrayXd>> v;
  auto add = [&v](auto& t) {
    v.emplace_back(t.data(), t.size());
  };
  add(m.conv1_w); add(m.conv1_b); add(m.conv2_w); add(m.conv2_b);
  add(m.enc_w); add(m.enc_b); add(m.dec_w); add(m.dec_b);
  add(m.deconv1_w); add(m.deconv1_b); add(m.deconv2_w); add(m.deconv2_b);
  return v;
}

std::vector<Eigen::ArrayXd> gradient_list(const Gradients& g) {
  std::vector<Eigen::ArrayXd> out;
  auto add = [&out](const auto& t) {
    out.emplace_back(Eigen::Map<const Eigen::ArrayXd>(t.data(), t.size()));
  };
  add(g.conv1_w); add(g.conv1_b); add(g.conv2_w); add(g.conv2_b);
  add(g.enc_w); add(g.enc_b); add(g.dec_w); add(g.dec_b);
  add(g.deconv1_w); add(g.deconv1_b); add(g.deconv2_w); add(g.deconv2_b);
  return out;
}

}  // namespace

void adam_step(std::vector<Eigen::Map<Eigen::ArrayXd>>& params,
               const std::vector<Eigen::ArrayXd>& grads, AdamState& state,
               double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-7;
  if (params.size() != grads.size())
    throw ArgumentError("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(Eigen::ArrayXd::Zero(p.size()));
      state.v.emplace_back(Eigen::ArrayXd::Zero(p.size()));
    }
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(beta2, double(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size())
      throw ArgumentError("adam_step: shape mismatch");
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i].square();
    params[i] -= lr * (state.m[i] / bc1) / ((state.v[i] / bc2).sqrt() + eps);
  }
}

Eigen::MatrixXd encode(const AutoencoderModel& m, const Eigen::MatrixXd& x) {
  if (x.cols() != kImagePixels)
    throw ArgumentError("encode: images must be 28x28");
  const ConvGeom g1 = AutoencoderModel::geom1();
  const ConvGeom g2 = AutoencoderModel::geom2();
  Eigen::MatrixXd z(x.rows(), m.latent_dim);
  for (Eigen::Index start = 0; start < x.rows(); start += kEncodeChunk) {
    const Eigen::Index len = std::min<Eigen::Index>(kEncodeChunk,
                                                    x.rows() - start);
    Eigen::MatrixXd h1 =
        relu(conv_forward(x.middleRows(start, len), g1, m.conv1_w, m.conv1_b));
    Eigen::MatrixXd h2 = relu(conv_forward(h1, g2, m.conv2_w, m.conv2_b));
    z.middleRows(start, len) = (h2 * m.enc_w).rowwise() + m.enc_b.transpose();
  }
  if (!z.allFinite()) throw NumericError("encode: non-finite output");
  return z;
}

Eigen::VectorXd encode(const AutoencoderModel& m, const Eigen::VectorXd& x) {
  return encode(m, Eigen::MatrixXd(x.transpose())).row(0);
}

Eigen::MatrixXd decode(const AutoencoderModel& m, const Eigen::MatrixXd& z) {
  if (z.cols() != m.latent_dim)
    throw ArgumentError("decode: latent length mismatch");
  const ConvGeom g1 = AutoencoderModel::geom1();
  const ConvGeom g2 = AutoencoderModel::geom2();
  Eigen::MatrixXd out(z.rows(), kImagePixels);
  for (Eigen::Index start = 0; start < z.rows(); start += kEncodeChunk) {
    const Eigen::Index len = std::min<Eigen::Index>(kEncodeChunk,
                                                    z.rows() - start);
    Eigen::MatrixXd h3 = relu(
        (z.middleRows(start, len) * m.dec_w).rowwise() + m.dec_b.transpose());
    Eigen::MatrixXd a4 = conv_backward_input(h3, g2, m.deconv1_w);
    for (Eigen::Index i = 0; i < a4.cols(); ++i)
      a4.col(i).array() += m.deconv1_b(i % 32);
    Eigen::MatrixXd a5 =
        conv_backward_input(relu(a4), g1, m.deconv2_w).array() +
        m.deconv2_b(0);
    out.middleRows(start, len) = sigmoid(a5);
  }
  return out;
}

Eigen::VectorXd decode(const AutoencoderModel& m, const Eigen::VectorXd& z) {
  return decode(m, Eigen::MatrixXd(z.transpose())).row(0);
}

double reconstruction_mse(const AutoencoderModel& m,
                          const Eigen::MatrixXd& x) {
  double sum = 0;
  for (Eigen::Index start = 0; start < x.rows(); start += kEncodeChunk) {
    const Eigen::Index len = std::min<Eigen::Index>(kEncodeChunk,
                                                    x.rows() - start);
    Eigen::MatrixXd block = x.middleRows(start, len);
    sum += (decode(m, encode(m, block)) - block).squaredNorm();
  }
  return sum / double(x.size());
}

Eigen::MatrixXd autoencoder_forward(const AutoencoderModel& m,
                                    const Eigen::MatrixXd& x) {
  if (x.cols() != kImagePixels)
    throw ArgumentError("autoencoder_forward: images must be 28x28");
  ForwardCache cache;
  forward(m, x, cache);
  return cache.y;
}

std::vector<Eigen::Map<Eigen::ArrayXd>> autoencoder_parameters(
    AutoencoderModel& m) {
  return parameter_views(m);
}

double autoencoder_loss_gradients(const AutoencoderModel& m,
                                  const Eigen::MatrixXd& batch,
                                  std::vector<Eigen::ArrayXd>& gradients) {
  if (batch.cols() != kImagePixels)
    throw ArgumentError("autoencoder_loss_gradients: images must be 28x28");
  ForwardCache cache;
  forward(m, batch, cache);
  const double denom = double(batch.size());
  const double loss = (cache.y - batch).squaredNorm() / denom;
  Eigen::MatrixXd dy = 2.0 * (cache.y - batch) / denom;
  Gradients grads;
  backward(m, batch, cache, dy, grads);
  gradients = gradient_list(grads);
  return loss;
}

AutoencoderModel train_autoencoder(const LabeledDataset& train,
                                   const ScheduleSpec& schedule,
                                   std::uint64_t seed, int latent_dim) {
  const Eigen::Index n = train.size();
  if (n == 0) throw ArgumentError("train_autoencoder: empty dataset");

  AutoencoderModel model = AutoencoderModel::init(latent_dim,
                                                  derive_seed(seed, 0));
  AdamState state;
  Gradients grads;

  const long batches_per_epoch =
      (n + schedule.batch_size - 1) / schedule.batch_size;
  const double total_steps = double(schedule.epochs) * batches_per_epoch;
  const double steps_per_update = total_steps / double(schedule.max_updates);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  long step = 0;
  ForwardCache cache;
  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    Rng rng(derive_seed(seed, 1000 + std::uint64_t(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (long b = 0; b < batches_per_epoch; ++b) {
      const Eigen::Index lo = b * schedule.batch_size;
      const Eigen::Index len =
          std::min<Eigen::Index>(schedule.batch_size, n - lo);
      Eigen::MatrixXd batch(len, kImagePixels);
      for (Eigen::Index i = 0; i < len; ++i)
        batch.row(i) = train.images.row(order[std::size_t(lo + i)]);

      forward(model, batch, cache);
      const double denom = double(batch.size());
      const double loss = (cache.y - batch).squaredNorm() / denom;
      if (!std::isfinite(loss))
        throw NumericError("train_autoencoder: loss diverged at step " +
                           std::to_string(step));
      epoch_loss += loss * double(len);

      Eigen::MatrixXd dy = 2.0 * (cache.y - batch) / denom;
      backward(model, batch, cache, dy, grads);

      const double lr = cosine_lr(schedule, double(step) / steps_per_update);
      auto params = parameter_views(model);
      adam_step(params, gradient_list(grads), state, lr);
      ++step;
    }
    model.loss_history.push_back(epoch_loss / double(n));
  }
  return model;
}

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    p.row(i).array() -= p.row(i).maxCoeff();
    p.row(i) = p.row(i).array().exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

}  // namespace

SoftmaxHead train_softmax_head(const AutoencoderModel& encoder,
                               const LabeledDataset& train,
                               const ScheduleSpec& schedule,
                               const std::vector<int>& classes,
                               std::uint64_t seed,
                               const SoftmaxHead* warm_start) {
  if (classes.empty()) throw ArgumentError("train_softmax_head: no classes");
  SoftmaxHead head;
  head.classes = classes;
  std::sort(head.classes.begin(), head.classes.end());
  const int c_count = int(head.classes.size());

  for (int label : train.labels)
    if (std::find(head.classes.begin(), head.classes.end(), label) ==
        head.classes.end())
      throw ArgumentError("train_softmax_head: label " +
                          std::to_string(label) + " outside class set");

  Rng init_rng(derive_seed(seed, 17));
  head.weights = glorot(encoder.latent_dim, c_count, encoder.latent_dim,
                        c_count, init_rng);
  head.biases = Eigen::VectorXd::Zero(c_count);
  if (warm_start) {
    for (int c = 0; c < c_count; ++c) {
      auto it = std::find(warm_start->classes.begin(),
                          warm_start->classes.end(), head.classes[c]);
      if (it == warm_start->classes.end()) continue;
      const auto old = it - warm_start->classes.begin();
      head.weights.col(c) = warm_start->weights.col(old);
      head.biases(c) = warm_start->biases(old);
    }
  }

  const Eigen::MatrixXd features = encode(encoder, train.images);
  const Eigen::Index n = features.rows();
  std::vector<int> targets(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    targets[std::size_t(i)] =
        int(std::find(head.classes.begin(), head.classes.end(),
                      train.labels[std::size_t(i)]) -
            head.classes.begin());

  const long batches_per_epoch =
      (n + schedule.batch_size - 1) / schedule.batch_size;
  const double total_steps = double(schedule.epochs) * batches_per_epoch;
  const double steps_per_update = total_steps / double(schedule.max_updates);

  AdamState state;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  long step = 0;
  for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
    Rng rng(derive_seed(seed, 2000 + std::uint64_t(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    for (long b = 0; b < batches_per_epoch; ++b) {
      const Eigen::Index lo = b * schedule.batch_size;
      const Eigen::Index len =
          std::min<Eigen::Index>(schedule.batch_size, n - lo);
      Eigen::MatrixXd batch(len, features.cols());
      for (Eigen::Index i = 0; i < len; ++i)
        batch.row(i) = features.row(order[std::size_t(lo + i)]);

      Eigen::MatrixXd probs = softmax_rows(
          (batch * head.weights).rowwise() + head.biases.transpose());
      for (Eigen::Index i = 0; i < len; ++i)
        probs(i, targets[std::size_t(order[std::size_t(lo + i)])]) -= 1.0;
      probs /= double(len);

      Eigen::MatrixXd dw = batch.transpose() * probs;
      Eigen::VectorXd db = probs.colwise().sum();
      const double lr = cosine_lr(schedule, double(step) / steps_per_update);

      std::vector<Eigen::Map<Eigen::ArrayXd>> params;
      params.emplace_back(head.weights.data(), head.weights.size());
      params.emplace_back(head.biases.data(), head.biases.size());
      std::vector<Eigen::ArrayXd> grads;
      grads.emplace_back(Eigen::Map<Eigen::ArrayXd>(dw.data(), dw.size()));
      grads.emplace_back(Eigen::Map<Eigen::ArrayXd>(db.data(), db.size()));
      adam_step(params, grads, state, lr);
      ++step;
    }
  }
  return head;
}

Eigen::MatrixXd softmax_probabilities(const SoftmaxHead& head,
                                      const Eigen::MatrixXd& latents) {
  return softmax_rows((latents * head.weights).rowwise() +
                      head.biases.transpose());
}

std::vector<int> predict_softmax_latent(const SoftmaxHead& head,
                                        const Eigen::MatrixXd& latents) {
  Eigen::MatrixXd logits =
      (latents * head.weights).rowwise() + head.biases.transpose();
  std::vector<int> out(std::size_t(latents.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;  // classes are sorted
    out[std::size_t(i)] = head.classes[std::size_t(best)];
  }
  return out;
}

std::vector<int> predict_softmax(const SoftmaxHead& head,
                                 const AutoencoderModel& encoder,
                                 const Eigen::MatrixXd& images) {
  return predict_softmax_latent(head, encode(encoder, images));
}

void save_autoencoder(const AutoencoderModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  binio::write_magic(out, "GMMIL-AE");
  binio::write_u32(out, 1);  // format version
  binio::write_u32(out, std::uint32_t(m.latent_dim));
  binio::write_tensor(out, m.conv1_w);
  binio::write_tensor(out, m.conv1_b);
  binio::write_tensor(out, m.conv2_w);
  binio::write_tensor(out, m.conv2_b);
  binio::write_tensor(out, m.enc_w);
  binio::write_tensor(out, m.enc_b);
  binio::write_tensor(out, m.dec_w);
  binio::write_tensor(out, m.dec_b);
  binio::write_tensor(out, m.deconv1_w);
  binio::write_tensor(out, m.deconv1_b);
  binio::write_tensor(out, m.deconv2_w);
  binio::write_tensor(out, m.deconv2_b);
  if (!out) throw FormatError(path + ": write failed");
}

AutoencoderModel load_autoencoder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  binio::check_magic(in, "GMMIL-AE", path);
  const auto version = binio::read_u32(in, path);
  if (version != 1)
    throw FormatError(path + ": unsupported version " +
                      std::to_string(version));
  AutoencoderModel m;
  m.latent_dim = int(binio::read_u32(in, path));
  m.conv1_w = binio::read_matrix(in, path);
  m.conv1_b = binio::read_vector(in, path);
  m.conv2_w = binio::read_matrix(in, path);
  m.conv2_b = binio::read_vector(in, path);
  m.enc_w = binio::read_matrix(in, path);
  m.enc_b = binio::read_vector(in, path);
  m.dec_w = binio::read_matrix(in, path);
  m.dec_b = binio::read_vector(in, path);
  m.deconv1_w = binio::read_matrix(in, path);
  m.deconv1_b = binio::read_vector(in, path);
  m.deconv2_w = binio::read_matrix(in, path);
  m.deconv2_b = binio::read_vector(in, path);
  return m;
}

}  // namespace gmmil
