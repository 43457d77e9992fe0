#pragma once

// Small fully connected networks with hand-written backpropagation. Samples
// are stored column-wise: an input batch is (input_dim x batch).

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mmho/rng.hpp"

namespace mmho::ddpg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { identity, relu, tanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view s);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;
  Activation activation = Activation::identity;
};

struct LayerGrad {
  Matrix weight;
  Vector bias;
};

using Gradients = std::vector<LayerGrad>;

/// Feed-forward net. An optional side input (e.g. the critic's action) is
/// concatenated below the activations entering layer `side_layer`.
class DenseNet {
 public:
  struct Tape {
    std::vector<Matrix> inputs;   // input seen by each layer (side already appended)
    std::vector<Matrix> outputs;  // post-activation output of each layer
  };

  struct Backprop {
    Gradients grads;
    Matrix d_input;
    Matrix d_side;
  };

  DenseNet() = default;
  /// sizes = {input, hidden..., output}; activations has sizes.size()-1 entries.
  DenseNet(const std::vector<int>& sizes, const std::vector<Activation>& activations, int side_layer = -1,
           int side_dim = 0);
  explicit DenseNet(std::vector<DenseLayer> layers, int side_layer = -1, int side_dim = 0);

  /// Fan-in uniform init; the last layer uses +-final_scale.
  void init(Rng& rng, double final_scale = 3e-3);

  int input_dim() const;
  int output_dim() const;
  int side_layer() const { return side_layer_; }
  int side_dim() const { return side_dim_; }
  std::size_t num_layers() const { return layers_.size(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  Matrix forward(const Matrix& x, const Matrix* side = nullptr) const;
  Matrix forward(const Matrix& x, const Matrix* side, Tape& tape) const;
  Backprop backward(const Tape& tape, const Matrix& d_output) const;

  std::size_t parameter_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);

  /// this <- tau * source + (1 - tau) * this
  void soft_update_from(const DenseNet& source, double tau);

  bool all_finite() const;
  Gradients zero_gradients() const;

 private:
  std::vector<DenseLayer> layers_;
  int side_layer_ = -1;
  int side_dim_ = 0;
};

double parameter_distance(const DenseNet& a, const DenseNet& b);

class Adam {
 public:
  Adam() = default;
  Adam(const DenseNet& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Descends along `grads`.
  void step(DenseNet& net, const Gradients& grads);
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long steps_ = 0;
  Gradients m_, v_;
};

}  // namespace mmho::ddpg
