#include "mmho/ddpg/net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mmho::ddpg {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "identity";
}

Activation activation_from_string(std::string_view s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + std::string(s) + "'");
}

namespace {

Matrix apply(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::tanh: return z.array().tanh().matrix();
    case Activation::identity: break;
  }
  return z;
}

// d(out)/d(z) expressed through the layer output.
Matrix derivative(Activation a, const Matrix& out) {
  switch (a) {
    case Activation::relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::tanh: return (1.0 - out.array().square()).matrix();
    case Activation::identity: break;
  }
  return Matrix::Ones(out.rows(), out.cols());
}

}  // namespace

DenseNet::DenseNet(const std::vector<int>& sizes, const std::vector<Activation>& activations, int side_layer,
                   int side_dim)
    : side_layer_(side_layer), side_dim_(side_layer >= 0 ? side_dim : 0) {
  if (sizes.size() < 2 || activations.size() != sizes.size() - 1)
    throw std::invalid_argument("DenseNet: need n+1 sizes for n activations");
  if (side_layer >= static_cast<int>(activations.size()))
    throw std::invalid_argument("DenseNet: side input layer out of range");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l] + (static_cast<int>(l) == side_layer_ ? side_dim_ : 0);
    DenseLayer layer;
    layer.weight = Matrix::Zero(sizes[l + 1], in);
    layer.bias = Vector::Zero(sizes[l + 1]);
    layer.activation = activations[l];
    layers_.push_back(std::move(layer));
  }
}

DenseNet::DenseNet(std::vector<DenseLayer> layers, int side_layer, int side_dim)
    : layers_(std::move(layers)), side_layer_(side_layer), side_dim_(side_layer >= 0 ? side_dim : 0) {
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const auto expected = layers_[l].weight.rows() + (static_cast<int>(l + 1) == side_layer_ ? side_dim_ : 0);
    if (layers_[l + 1].weight.cols() != expected) throw std::invalid_argument("DenseNet: layer shapes do not chain");
  }
}

void DenseNet::init(Rng& rng, double final_scale) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    const double bound = (l + 1 == layers_.size()) ? final_scale : 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = u(rng);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = u(rng);
  }
}

int DenseNet::input_dim() const {
  if (layers_.empty()) return 0;
  return static_cast<int>(layers_.front().weight.cols()) - (side_layer_ == 0 ? side_dim_ : 0);
}

int DenseNet::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

Matrix DenseNet::forward(const Matrix& x, const Matrix* side) const {
  Tape tape;
  return forward(x, side, tape);
}

Matrix DenseNet::forward(const Matrix& x, const Matrix* side, Tape& tape) const {
  tape.inputs.clear();
  tape.outputs.clear();
  Matrix h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (static_cast<int>(l) == side_layer_) {
      if (side == nullptr || side->cols() != h.cols() || side->rows() != side_dim_)
        throw std::invalid_argument("DenseNet: missing or mis-shaped side input");
      Matrix joined(h.rows() + side->rows(), h.cols());
      joined << h, *side;
      h = std::move(joined);
    }
    const DenseLayer& layer = layers_[l];
    if (h.rows() != layer.weight.cols()) throw std::invalid_argument("DenseNet: input dimension mismatch");
    tape.inputs.push_back(h);
    Matrix z = layer.weight * h;
    z.colwise() += layer.bias;
    h = apply(layer.activation, z);
    tape.outputs.push_back(h);
  }
  return h;
}

DenseNet::Backprop DenseNet::backward(const Tape& tape, const Matrix& d_output) const {
  Backprop out;
  out.grads.resize(layers_.size());
  Matrix delta = d_output;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const DenseLayer& layer = layers_[li];
    const Matrix dz = delta.cwiseProduct(derivative(layer.activation, tape.outputs[li]));
    out.grads[li].weight = dz * tape.inputs[li].transpose();
    out.grads[li].bias = dz.rowwise().sum();
    Matrix d_in = layer.weight.transpose() * dz;
    if (static_cast<int>(li) == side_layer_) {
      const Eigen::Index main = d_in.rows() - side_dim_;
      out.d_side = d_in.bottomRows(side_dim_);
      delta = d_in.topRows(main);
    } else {
      delta = std::move(d_in);
    }
  }
  out.d_input = std::move(delta);
  return out;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> DenseNet::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  }
  return out;
}

void DenseNet::unflatten(const std::vector<double>& params) {
  if (params.size() != parameter_count()) throw std::invalid_argument("DenseNet: parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = params[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = params[k++];
  }
}

void DenseNet::soft_update_from(const DenseNet& source, double tau) {
  if (source.layers_.size() != layers_.size()) throw std::invalid_argument("soft update between different shapes");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight = tau * source.layers_[l].weight + (1.0 - tau) * layers_[l].weight;
    layers_[l].bias = tau * source.layers_[l].bias + (1.0 - tau) * layers_[l].bias;
  }
}

bool DenseNet::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

Gradients DenseNet::zero_gradients() const {
  Gradients g(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    g[l].weight = Matrix::Zero(layers_[l].weight.rows(), layers_[l].weight.cols());
    g[l].bias = Vector::Zero(layers_[l].bias.size());
  }
  return g;
}

double parameter_distance(const DenseNet& a, const DenseNet& b) {
  double sq = 0.0;
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    sq += (a.layers()[l].weight - b.layers()[l].weight).squaredNorm();
    sq += (a.layers()[l].bias - b.layers()[l].bias).squaredNorm();
  }
  return std::sqrt(sq);
}

Adam::Adam(const DenseNet& net, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.zero_gradients()), v_(net.zero_gradients()) {}

void Adam::step(DenseNet& net, const Gradients& grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    m_[l].weight = beta1_ * m_[l].weight + (1.0 - beta1_) * grads[l].weight;
    v_[l].weight = beta2_ * v_[l].weight + (1.0 - beta2_) * grads[l].weight.cwiseProduct(grads[l].weight);
    m_[l].bias = beta1_ * m_[l].bias + (1.0 - beta1_) * grads[l].bias;
    v_[l].bias = beta2_ * v_[l].bias + (1.0 - beta2_) * grads[l].bias.cwiseProduct(grads[l].bias);
    layers[l].weight.array() -= lr_ * (m_[l].weight.array() / c1) / ((v_[l].weight.array() / c2).sqrt() + eps_);
    layers[l].bias.array() -= lr_ * (m_[l].bias.array() / c1) / ((v_[l].bias.array() / c2).sqrt() + eps_);
  }
}

}  // namespace mmho::ddpg
