#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gmmil/conv.hpp"
#include "gmmil/dataset.hpp"

namespace gmmil {

struct ScheduleSpec {
  double base_lr = 0.003;
  double final_lr = 0.001;
  int max_updates = 20;
  int warmup_steps = 5;
  int epochs = 40;
  int batch_size = 50;
};

// Linear warmup from 0 to base_lr over warmup_steps, cosine decay to
// final_lr at max_updates, clamped afterwards. update_pos may be fractional
// (training maps its step counter uniformly onto [0, max_updates]).
double cosine_lr(const ScheduleSpec& spec, double update_pos);

// Conv encoder/decoder pair: 28x28x1 -> conv s2 ReLU (32) -> conv s2 ReLU
// (64) -> flatten 3136 -> dense latent; decoder mirrors with transposed
// convolutions, ReLU in between and sigmoid on the output.
struct AutoencoderModel {
  int latent_dim = 100;

  Eigen::MatrixXd conv1_w;    // 9 x 32
  Eigen::VectorXd conv1_b;    // 32
  Eigen::MatrixXd conv2_w;    // 288 x 64
  Eigen::VectorXd conv2_b;    // 64
  Eigen::MatrixXd enc_w;      // 3136 x latent_dim
  Eigen::VectorXd enc_b;      // latent_dim
  Eigen::MatrixXd dec_w;      // latent_dim x 3136
  Eigen::VectorXd dec_b;      // 3136
  Eigen::MatrixXd deconv1_w;  // 288 x 64, conv-direction weights (32<-64)
  Eigen::VectorXd deconv1_b;  // 32
  Eigen::MatrixXd deconv2_w;  // 9 x 32, conv-direction weights (1<-32)
  Eigen::VectorXd deconv2_b;  // 1

  std::vector<double> loss_history;  // per-epoch mean training MSE

  static ConvGeom geom1() { return {28, 28, 1, 32}; }
  static ConvGeom geom2() { return {14, 14, 32, 64}; }

  static AutoencoderModel init(int latent_dim, std::uint64_t seed);
};

// Encoder forward pass; one image (or latent) per row.
Eigen::MatrixXd encode(const AutoencoderModel& model,
                       const Eigen::MatrixXd& images);
Eigen::VectorXd encode(const AutoencoderModel& model,
                       const Eigen::VectorXd& image);

// Decoder forward pass; outputs lie in (0,1).
Eigen::MatrixXd decode(const AutoencoderModel& model,
                       const Eigen::MatrixXd& latents);
Eigen::VectorXd decode(const AutoencoderModel& model,
                       const Eigen::VectorXd& latent);

double reconstruction_mse(const AutoencoderModel& model,
                          const Eigen::MatrixXd& images);

// Full forward pass through encoder and decoder in one call.
Eigen::MatrixXd autoencoder_forward(const AutoencoderModel& model,
                                    const Eigen::MatrixXd& images);

// Flat views over every tensor of the model, in a fixed order. The same
// order is used by autoencoder_loss_gradients, so view i pairs with
// gradient i (useful for optimizer plumbing and finite-difference checks).
std::vector<Eigen::Map<Eigen::ArrayXd>> autoencoder_parameters(
    AutoencoderModel& model);

// Mean-squared reconstruction loss of one batch plus its analytic gradient
// with respect to every parameter tensor, flattened.
double autoencoder_loss_gradients(const AutoencoderModel& model,
                                  const Eigen::MatrixXd& batch,
                                  std::vector<Eigen::ArrayXd>& gradients);

AutoencoderModel train_autoencoder(const LabeledDataset& train,
                                   const ScheduleSpec& schedule,
                                   std::uint64_t seed, int latent_dim = 100);

struct AdamState {
  std::vector<Eigen::ArrayXd> m, v;
  long t = 0;
};

// Standard Adam (beta1 0.9, beta2 0.999, eps 1e-7, bias correction) over a
// flat list of parameter views.
void adam_step(std::vector<Eigen::Map<Eigen::ArrayXd>>& params,
               const std::vector<Eigen::ArrayXd>& grads, AdamState& state,
               double lr);

struct SoftmaxHead {
  std::vector<int> classes;  // column order of weights
  Eigen::MatrixXd weights;   // latent_dim x C
  Eigen::VectorXd biases;    // C
};

// Cross-entropy head over encoded features; the encoder stays frozen. When
// warm_start is given its columns are carried over and missing classes get
// fresh columns (incremental protocol: training data may cover only the new
// classes).
SoftmaxHead train_softmax_head(const AutoencoderModel& encoder,
                               const LabeledDataset& train,
                               const ScheduleSpec& schedule,
                               const std::vector<int>& classes,
                               std::uint64_t seed,
                               const SoftmaxHead* warm_start = nullptr);

Eigen::MatrixXd softmax_probabilities(const SoftmaxHead& head,
                                      const Eigen::MatrixXd& latents);
// argmax of the softmax output, ties to the lowest class id
std::vector<int> predict_softmax_latent(const SoftmaxHead& head,
                                        const Eigen::MatrixXd& latents);
std::vector<int> predict_softmax(const SoftmaxHead& head,
                                 const AutoencoderModel& encoder,
                                 const Eigen::MatrixXd& images);

// Versioned binary container ("GMMIL-AE"), tensors as little-endian doubles.
void save_autoencoder(const AutoencoderModel& model, const std::string& path);
AutoencoderModel load_autoencoder(const std::string& path);

}  // namespace gmmil
