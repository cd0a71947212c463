#include "wiretap/network.h"

#include <algorithm>
#include <cmath>

namespace wiretap {

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
  }
  return "unknown";
}

Activation ParseActivation(std::string_view name) {
  for (Activation a : {Activation::kIdentity, Activation::kRelu,
                       Activation::kSigmoid, Activation::kTanh,
                       Activation::kSoftmax}) {
    if (ActivationName(a) == name) return a;
  }
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

ParamEntry& ParamStore::Add(const std::string& name, Tensor init) {
  if (contains(name)) {
    throw std::invalid_argument("duplicate parameter name '" + name + "'");
  }
  ParamEntry e;
  e.grad = Tensor(init.shape());
  e.first_moment = Tensor(init.shape());
  e.second_moment = Tensor(init.shape());
  e.weights = std::move(init);
  return entries_.emplace(name, std::move(e)).first->second;
}

ParamEntry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::out_of_range("no parameter named '" + name + "'");
  }
  return it->second;
}

const ParamEntry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::out_of_range("no parameter named '" + name + "'");
  }
  return it->second;
}

void ParamStore::ZeroGrad() {
  for (auto& [_, e] : entries_) e.grad.Fill(0.0);
}

bool ParamStore::GradsAllZero() const {
  for (const auto& [_, e] : entries_) {
    for (double g : e.grad.values()) {
      if (g != 0.0) return false;
    }
  }
  return true;
}

std::map<std::string, Tensor> ParamStore::Weights() const {
  std::map<std::string, Tensor> out;
  for (const auto& [name, e] : entries_) out.emplace(name, e.weights);
  return out;
}

void ParamStore::LoadWeights(const std::map<std::string, Tensor>& weights) {
  for (auto& [name, e] : entries_) {
    auto it = weights.find(name);
    if (it == weights.end()) {
      throw std::invalid_argument("checkpoint lacks parameter '" + name + "'");
    }
    if (!it->second.SameShape(e.weights)) {
      throw std::invalid_argument("parameter '" + name + "' has shape " +
                                  it->second.ShapeString() + ", expected " +
                                  e.weights.ShapeString());
    }
  }
  for (auto& [name, e] : entries_) {
    e.weights = weights.at(name);
    e.grad.Fill(0.0);
    e.first_moment.Fill(0.0);
    e.second_moment.Fill(0.0);
  }
  steps_ = 0;
}

Network::Network(std::string name, std::size_t input_width,
                 std::vector<DenseSpec> layers)
    : name_(std::move(name)), input_width_(input_width),
      layers_(std::move(layers)) {
  if (input_width_ == 0) throw std::invalid_argument("network input width is 0");
  if (layers_.empty()) throw std::invalid_argument("network has no layers");
  std::size_t fan_in = input_width_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].width == 0) {
      throw std::invalid_argument(name_ + " layer " + std::to_string(l) +
                                  " has zero width");
    }
    params_.Add(WeightName(l), Tensor::Matrix(fan_in, layers_[l].width));
    params_.Add(BiasName(l), Tensor::Matrix(1, layers_[l].width));
    fan_in = layers_[l].width;
  }
}

std::string Network::WeightName(std::size_t layer) const {
  return name_ + "." + std::to_string(layer) + ".weight";
}

std::string Network::BiasName(std::size_t layer) const {
  return name_ + "." + std::to_string(layer) + ".bias";
}

std::size_t Network::output_width() const {
  return layers_.empty() ? 0 : layers_.back().width;
}

void Network::Initialize(Rng& rng) {
  std::size_t fan_in = input_width_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::size_t fan_out = layers_[l].width;
    const double limit =
        layers_[l].activation == Activation::kRelu
            ? std::sqrt(6.0 / static_cast<double>(fan_in))
            : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : params_.at(WeightName(l)).weights.values()) w = dist(rng);
    params_.at(BiasName(l)).weights.Fill(0.0);
    fan_in = fan_out;
  }
  cache_valid_ = false;
}

void Network::ZeroFinalLayer() {
  const std::size_t last = layers_.size() - 1;
  params_.at(WeightName(last)).weights.Fill(0.0);
  params_.at(BiasName(last)).weights.Fill(0.0);
}

namespace {

void ApplyActivation(Activation act, RowMatrix& z) {
  switch (act) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kSigmoid:
      z = z.unaryExpr([](double v) {
        // Split on sign so exp never overflows.
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      });
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kSoftmax:
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double mx = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - mx).exp().matrix();
        z.row(r) /= z.row(r).sum();
      }
      break;
  }
}

}  // namespace

Tensor Network::Forward(const Tensor& input, bool record) {
  if (input.rank() != 2 || input.cols() != input_width_) {
    throw std::invalid_argument(name_ + " layer 0 expects input width " +
                                std::to_string(input_width_) + ", got shape " +
                                input.ShapeString());
  }
  if (record) {
    layer_inputs_.clear();
    layer_outputs_.clear();
  }
  cache_valid_ = false;

  Tensor current = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& w = params_.at(WeightName(l)).weights;
    const auto& b = params_.at(BiasName(l)).weights;
    if (current.cols() != w.rows()) {
      throw std::invalid_argument(name_ + " layer " + std::to_string(l) +
                                  " expects width " + std::to_string(w.rows()) +
                                  ", got " + std::to_string(current.cols()));
    }
    RowMatrix z = current.mat() * w.mat();
    z.rowwise() += b.mat().row(0);
    ApplyActivation(layers_[l].activation, z);
    Tensor out = Tensor::FromMatrix(z);
    if (!out.AllFinite()) {
      throw NumericError(name_ + " layer " + std::to_string(l) +
                         " produced non-finite activations");
    }
    if (record) {
      layer_inputs_.push_back(std::move(current));
      layer_outputs_.push_back(out);
    }
    current = std::move(out);
  }
  cache_valid_ = record;
  return current;
}

Tensor Network::Backward(const Tensor& output_grad, GradMode mode) {
  if (!cache_valid_) {
    throw std::logic_error(name_ + ": backward called without a recorded forward");
  }
  if (!output_grad.SameShape(layer_outputs_.back())) {
    throw std::invalid_argument(name_ + ": output gradient shape " +
                                output_grad.ShapeString() + " != output shape " +
                                layer_outputs_.back().ShapeString());
  }
  RowMatrix g = output_grad.mat();
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const RowMatrix& y = layer_outputs_[li].mat();
    const double slope = corrupt_backward_ ? 1.1 : 1.0;
    switch (layers_[li].activation) {
      case Activation::kIdentity:
        g *= slope;
        break;
      case Activation::kRelu:
        g = (y.array() > 0.0).select(g.array() * slope, 0.0).matrix();
        break;
      case Activation::kSigmoid:
        g = (g.array() * y.array() * (1.0 - y.array()) * slope).matrix();
        break;
      case Activation::kTanh:
        g = (g.array() * (1.0 - y.array().square()) * slope).matrix();
        break;
      case Activation::kSoftmax: {
        Eigen::VectorXd dots = (g.array() * y.array()).rowwise().sum();
        g = (y.array() * (g.colwise() - dots).array() * slope).matrix();
        break;
      }
    }
    auto& w = params_.at(WeightName(li));
    if (mode == GradMode::kAccumulate) {
      auto& b = params_.at(BiasName(li));
      w.grad.mat().noalias() += layer_inputs_[li].mat().transpose() * g;
      b.grad.mat().row(0) += g.colwise().sum();
    }
    RowMatrix next = g * w.weights.mat().transpose();
    g = std::move(next);
  }
  Tensor input_grad = Tensor::FromMatrix(g);
  if (!input_grad.AllFinite()) {
    throw NumericError(name_ + ": non-finite gradient in backward pass");
  }
  return input_grad;
}

Network MakeMlp(std::string name, std::size_t input_width,
                const std::vector<std::size_t>& hidden, std::size_t output_width,
                Activation output_activation) {
  std::vector<DenseSpec> layers;
  for (std::size_t h : hidden) layers.push_back({h, Activation::kRelu});
  layers.push_back({output_width, output_activation});
  return Network(std::move(name), input_width, std::move(layers));
}

}  // namespace wiretap
