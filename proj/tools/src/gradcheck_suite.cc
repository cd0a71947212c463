#include "wiretap_app/gradcheck_suite.h"

#include <cmath>

#include "wiretap/channel.h"
#include "wiretap/glyphs.h"
#include "wiretap/models.h"
#include "wiretap/training.h"

namespace wiretap::app {
namespace {

Tensor RandomMatrix(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t = Tensor::Matrix(rows, cols);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// L = sum_ij c_ij * out_ij with fixed random c.
OutputLoss WeightedSum(const Tensor& c) {
  return [c](const Tensor& out, Tensor& grad) {
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      total += c[i] * out[i];
      grad[i] = c[i];
    }
    return total;
  };
}

NamedCheck LayerCheck(Activation act, bool corrupt, const GradCheckOptions& opts, Rng& rng) {
  Network net("gc_" + std::string(ActivationName(act)), 5,
              {{6, Activation::kTanh}, {4, act}});
  net.Initialize(rng);
  net.set_corrupt_backward(corrupt);
  const Tensor input = RandomMatrix(3, 5, rng, -1.0, 1.0);
  const Tensor c = RandomMatrix(3, 4, rng, -1.0, 1.0);
  return {"dense+" + std::string(ActivationName(act)), GradCheck(net, input, WeightedSum(c), opts)};
}

// relaxed_flip as a function of p, via a one-entry store holding p.
NamedCheck RelaxedFlipCheck(const GradCheckOptions& opts, Rng& rng) {
  ParamStore store;
  ParamEntry& p = store.Add("p", RandomMatrix(4, 6, rng, 0.05, 0.95));
  const std::vector<double> eps{0.0, 0.001, 0.1, 0.2, 0.3, 0.45};
  const Tensor c = RandomMatrix(4, 6, rng, -1.0, 1.0);
  auto value = [&] {
    const Tensor q = RelaxedFlip(p.weights, eps);
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) total += c[i] * std::log(q[i]);
    return total;
  };
  auto gradient = [&] {
    const Tensor q = RelaxedFlip(p.weights, eps);
    Tensor gq(q.shape());
    for (std::size_t i = 0; i < q.size(); ++i) gq[i] = c[i] / q[i];
    p.grad = RelaxedFlipBackward(gq, eps);
  };
  ParamStore* stores[] = {&store};
  return {"relaxed_flip", GradCheckStores(stores, value, gradient, opts)};
}

// The straight-through contract: backward is the identity Jacobian, which
// is the exact derivative of the forward expectation E[x] = p.
NamedCheck StraightThroughCheck(const GradCheckOptions& opts, Rng& rng) {
  ParamStore store;
  ParamEntry& p = store.Add("p", RandomMatrix(3, 5, rng, 0.05, 0.95));
  const Tensor c = RandomMatrix(3, 5, rng, -1.0, 1.0);
  auto value = [&] {
    double total = 0.0;  // E[sum c x] for x ~ Bernoulli(p)
    for (std::size_t i = 0; i < c.size(); ++i) total += c[i] * p.weights[i];
    return total;
  };
  auto gradient = [&] { p.grad = StraightThroughBackward(c); };
  ParamStore* stores[] = {&store};
  NamedCheck check{"straight_through", GradCheckStores(stores, value, gradient, opts)};
  // The forward pass must emit hard bits.
  Rng sample_rng(rng());
  const Tensor bits = SampleBitsStraightThrough(p.weights, sample_rng);
  for (double v : bits.values()) {
    if (v != 0.0 && v != 1.0) check.report.passed = false;
  }
  return check;
}

NamedCheck FullLossCheck(bool corrupt, const GradCheckOptions& base, Rng& rng) {
  TrainConfig cfg;
  cfg.lambda = 2.0;
  cfg.channel = ChannelSpec({{3, 0.1, 0.2}, {3, 0.05, 0.3}});
  cfg.sampling = SamplingMode::kRelaxed;
  cfg.model.image_size = 8;
  cfg.model.code_bits = cfg.channel.total_bits();
  cfg.model.encoder_hidden = {5};
  cfg.model.decoder_hidden = {5};
  cfg.model.eve_hidden = {4};
  Models models = MakeModels(cfg, rng);
  models.encoder.network().set_corrupt_backward(corrupt);
  models.decoder.network().set_corrupt_backward(corrupt);
  const Dataset batch = ToDataset(GenerateGlyphs(4, 8, rng()));
  const std::uint64_t loss_seed = rng();
  auto value = [&] {
    Rng r(loss_seed);
    return TotalLoss(batch, models, cfg, r, false).total;
  };
  auto gradient = [&] {
    Rng r(loss_seed);
    TotalLoss(batch, models, cfg, r, true);
  };
  ParamStore* stores[] = {&models.encoder.network().params(),
                          &models.decoder.network().params()};
  GradCheckOptions opts = base;
  opts.max_per_entry = 40;
  return {"total_loss(relaxed)", GradCheckStores(stores, value, gradient, opts)};
}

}  // namespace

std::vector<NamedCheck> RunGradCheckSuite(bool corrupt, double tolerance) {
  GradCheckOptions opts;
  opts.tolerance = tolerance;
  Rng rng(20240611);
  std::vector<NamedCheck> out;
  for (Activation a : {Activation::kIdentity, Activation::kRelu, Activation::kSigmoid,
                       Activation::kTanh, Activation::kSoftmax}) {
    out.push_back(LayerCheck(a, corrupt, opts, rng));
  }
  out.push_back(RelaxedFlipCheck(opts, rng));
  out.push_back(StraightThroughCheck(opts, rng));
  out.push_back(FullLossCheck(corrupt, opts, rng));
  return out;
}

}  // namespace wiretap::app
