#ifndef WIRETAP_NETWORK_H_
#define WIRETAP_NETWORK_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/tensor.h"

namespace wiretap {

enum class Activation { kIdentity, kRelu, kSigmoid, kTanh, kSoftmax };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

struct DenseSpec {
  std::size_t width = 0;
  Activation activation = Activation::kIdentity;
};

// One trainable tensor with its gradient slot and Adam moments.
struct ParamEntry {
  Tensor weights;
  Tensor grad;
  Tensor first_moment;
  Tensor second_moment;
};

class ParamStore {
 public:
  ParamEntry& Add(const std::string& name, Tensor init);

  ParamEntry& at(const std::string& name);
  const ParamEntry& at(const std::string& name) const;
  bool contains(const std::string& name) const {
    return entries_.count(name) != 0;
  }
  std::size_t size() const { return entries_.size(); }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void ZeroGrad();
  bool GradsAllZero() const;

  std::uint64_t step_count() const { return steps_; }
  void AdvanceStep() { ++steps_; }

  std::map<std::string, Tensor> Weights() const;
  // Replaces weights by name; shapes must match, optimizer state is reset.
  void LoadWeights(const std::map<std::string, Tensor>& weights);

 private:
  std::map<std::string, ParamEntry> entries_;
  std::uint64_t steps_ = 0;
};

enum class GradMode {
  kAccumulate,  // write parameter gradients and return the input gradient
  kInputOnly,   // return the input gradient, leave parameter grads untouched
};

// Feed-forward chain of dense layers. Parameters live in the owned
// ParamStore under "<name>.<layer>.weight" / "<name>.<layer>.bias".
class Network {
 public:
  Network() = default;
  Network(std::string name, std::size_t input_width,
          std::vector<DenseSpec> layers);

  // He-uniform for relu layers, Glorot-uniform otherwise; zero biases.
  void Initialize(Rng& rng);
  void ZeroFinalLayer();

  Tensor Forward(const Tensor& input, bool record);
  // Requires a recorded forward pass. Returns d(loss)/d(input).
  Tensor Backward(const Tensor& output_grad,
                  GradMode mode = GradMode::kAccumulate);
  bool has_record() const { return cache_valid_; }

  const std::string& name() const { return name_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const;
  const std::vector<DenseSpec>& layers() const { return layers_; }

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  std::string WeightName(std::size_t layer) const;
  std::string BiasName(std::size_t layer) const;

  // Negative control for gradient checks: perturbs the activation
  // derivative used in Backward.
  void set_corrupt_backward(bool on) { corrupt_backward_ = on; }

 private:
  std::string name_;
  std::size_t input_width_ = 0;
  std::vector<DenseSpec> layers_;
  ParamStore params_;

  std::vector<Tensor> layer_inputs_;
  std::vector<Tensor> layer_outputs_;
  bool cache_valid_ = false;
  bool corrupt_backward_ = false;
};

// Builds "in -> hidden... -> out" with relu hidden layers.
Network MakeMlp(std::string name, std::size_t input_width,
                const std::vector<std::size_t>& hidden, std::size_t output_width,
                Activation output_activation);

}  // namespace wiretap

#endif  // WIRETAP_NETWORK_H_
