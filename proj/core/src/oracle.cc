#include "wiretap/oracle.h"

#include <algorithm>
#include <cmath>
#include <span>

#include "wiretap/mi.h"
#include "wiretap/models.h"

namespace wiretap {

std::vector<double> TabularEncoder::Probabilities() const {
  std::vector<double> p(logits.size());
  for (std::size_t s = 0; s < s_size; ++s) {
    const double* z = logits.data() + s * code_size;
    const double mx = *std::max_element(z, z + code_size);
    double sum = 0.0;
    for (std::size_t x = 0; x < code_size; ++x) {
      p[s * code_size + x] = std::exp(z[x] - mx);
      sum += p[s * code_size + x];
    }
    for (std::size_t x = 0; x < code_size; ++x) p[s * code_size + x] /= sum;
  }
  return p;
}

TabularEncoder TabularEncoder::FromTable(const std::vector<double>& table,
                                         std::size_t s_size, std::size_t code_size) {
  if (table.size() != s_size * code_size) {
    throw std::invalid_argument("encoder table size mismatch");
  }
  TabularEncoder enc{s_size, code_size, std::vector<double>(table.size())};
  for (std::size_t i = 0; i < table.size(); ++i) {
    enc.logits[i] = std::log(std::max(table[i], 1e-30));
  }
  return enc;
}

namespace {

struct Evaluation {
  ObjectiveTerms terms;
  std::vector<double> grad_probs;  // d(objective)/d P(x|s)
};

Evaluation Evaluate(const std::vector<double>& enc, const DiscreteSystem& sys,
                    const ChannelSpec& spec, double lambda, bool want_grad) {
  CheckEnumerationBound(sys.s_size, sys.code_bits);
  if (spec.total_bits() != sys.code_bits) {
    throw std::invalid_argument("channel length does not match the system's code bits");
  }
  const std::size_t ns = sys.s_size;
  const std::size_t nt = sys.t_size;
  const std::size_t ny = sys.code_size();
  const auto wb = ChannelTransition(spec, Observer::kBob);
  const auto we = ChannelTransition(spec, Observer::kEve);
  const auto pb = ObservationGivenSource(sys, enc, wb);
  const auto pe = ObservationGivenSource(sys, enc, we);
  const auto ps = sys.SourceMarginal();
  const auto pt = sys.SensitiveMarginal();

  std::vector<double> py_b(ny, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t y = 0; y < ny; ++y) py_b[y] += ps[s] * pb[s * ny + y];
  }
  std::vector<std::size_t> map(ny, 0);
  for (std::size_t y = 0; y < ny; ++y) {
    double best = -1.0;
    for (std::size_t s = 0; s < ns; ++s) {
      const double j = ps[s] * pb[s * ny + y];
      if (j > best) {
        best = j;
        map[y] = s;
      }
    }
  }
  std::vector<double> jte(nt * ny, 0.0), py_e(ny, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < ns; ++s) {
      const double pts = sys.p_ts(t, s);
      if (pts == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) jte[t * ny + y] += pts * pe[s * ny + y];
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t y = 0; y < ny; ++y) py_e[y] += jte[t * ny + y];
  }

  Evaluation ev;
  // Per-(s, y) derivatives w.r.t. P(y_b | s) and P(y_e | s).
  std::vector<double> gb(ns * ny, 0.0), ge(ns * ny, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double cond = pb[s * ny + y];
      const double ham = static_cast<double>(HammingDistance(s, map[y]));
      ev.terms.distortion += ps[s] * cond * ham;
      const double log_ratio = cond > 0.0 && py_b[y] > 0.0 ? std::log2(cond / py_b[y]) : 0.0;
      ev.terms.mi_bob += ps[s] * cond * log_ratio;
      gb[s * ny + y] = ps[s] * ham - ps[s] * log_ratio;
    }
  }
  std::vector<double> log_te(nt * ny, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double j = jte[t * ny + y];
      if (j > 0.0) {
        log_te[t * ny + y] = std::log2(j / (pt[t] * py_e[y]));
        ev.terms.mi_eve += j * log_te[t * ny + y];
      }
    }
  }
  ev.terms.mi_bob = std::max(ev.terms.mi_bob, 0.0);
  ev.terms.mi_eve = std::max(ev.terms.mi_eve, 0.0);
  ev.terms.objective = ev.terms.distortion - ev.terms.mi_bob + lambda * ev.terms.mi_eve;

  if (want_grad) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t y = 0; y < ny; ++y) {
        double g = 0.0;
        for (std::size_t t = 0; t < nt; ++t) g += sys.p_ts(t, s) * log_te[t * ny + y];
        ge[s * ny + y] = lambda * g;
      }
    }
    ev.grad_probs.assign(ns * ny, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t x = 0; x < ny; ++x) {
        double g = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          g += wb[x * ny + y] * gb[s * ny + y] + we[x * ny + y] * ge[s * ny + y];
        }
        ev.grad_probs[s * ny + x] = g;
      }
    }
  }
  return ev;
}

void CheckEncoderShape(const TabularEncoder& enc, const DiscreteSystem& sys) {
  if (enc.s_size != sys.s_size || enc.code_size != sys.code_size() ||
      enc.logits.size() != enc.s_size * enc.code_size) {
    throw std::invalid_argument("tabular encoder shape does not match the system");
  }
}

TabularEncoder Harden(const TabularEncoder& enc) {
  const auto probs = enc.Probabilities();
  std::vector<double> table(probs.size(), 0.0);
  for (std::size_t s = 0; s < enc.s_size; ++s) {
    const auto row = std::span<const double>(probs).subspan(s * enc.code_size, enc.code_size);
    table[s * enc.code_size + static_cast<std::size_t>(Argmax(row))] = 1.0;
  }
  return TabularEncoder::FromTable(table, enc.s_size, enc.code_size);
}

}  // namespace

ObjectiveTerms ExactObjective(const TabularEncoder& encoder, const DiscreteSystem& sys,
                              const ChannelSpec& spec, double lambda) {
  CheckEncoderShape(encoder, sys);
  return Evaluate(encoder.Probabilities(), sys, spec, lambda, false).terms;
}

ObjectiveTerms ExactObjectiveWithGradient(const TabularEncoder& encoder,
                                          const DiscreteSystem& sys,
                                          const ChannelSpec& spec, double lambda,
                                          std::vector<double>& grad_logits) {
  CheckEncoderShape(encoder, sys);
  const auto probs = encoder.Probabilities();
  Evaluation ev = Evaluate(probs, sys, spec, lambda, true);
  const std::size_t nx = encoder.code_size;
  grad_logits.assign(probs.size(), 0.0);
  for (std::size_t s = 0; s < encoder.s_size; ++s) {
    double dot = 0.0;
    for (std::size_t x = 0; x < nx; ++x) dot += probs[s * nx + x] * ev.grad_probs[s * nx + x];
    for (std::size_t x = 0; x < nx; ++x) {
      grad_logits[s * nx + x] = probs[s * nx + x] * (ev.grad_probs[s * nx + x] - dot);
    }
  }
  return ev.terms;
}

OracleResult OptimizeExact(const DiscreteSystem& sys, const ChannelSpec& spec,
                           double lambda, const OracleOptions& options) {
  if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  CheckEnumerationBound(sys.s_size, sys.code_bits);
  Rng rng(options.seed);
  std::normal_distribution<double> init(0.0, options.init_scale);
  const std::size_t size = sys.s_size * sys.code_size();

  OracleResult best;
  bool have_best = false;
  std::vector<double> grad;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    TabularEncoder enc{sys.s_size, sys.code_size(), std::vector<double>(size)};
    for (double& z : enc.logits) z = init(rng);
    std::vector<double> m(size, 0.0), v(size, 0.0);
    const double b1 = 0.9, b2 = 0.999;
    double grad_norm = 0.0;
    for (std::size_t it = 1; it <= options.iterations; ++it) {
      ExactObjectiveWithGradient(enc, sys, spec, lambda, grad);
      grad_norm = 0.0;
      for (std::size_t i = 0; i < size; ++i) {
        m[i] = b1 * m[i] + (1 - b1) * grad[i];
        v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
        const double mh = m[i] / (1 - std::pow(b1, static_cast<double>(it)));
        const double vh = v[i] / (1 - std::pow(b2, static_cast<double>(it)));
        enc.logits[i] -= options.lr * mh / (std::sqrt(vh) + 1e-12);
        grad_norm += grad[i] * grad[i];
      }
    }
    // Optima at large lambda sit on simplex vertices that the softmax only
    // approaches, so the row-argmax table competes as a second candidate.
    for (const TabularEncoder& cand : {enc, Harden(enc)}) {
      const ObjectiveTerms terms = ExactObjective(cand, sys, spec, lambda);
      if (!have_best || terms.objective < best.point.objective) {
        have_best = true;
        best.encoder = cand;
        best.point = FrontierPoint{lambda, terms.distortion, terms.mi_bob, terms.mi_eve,
                                   terms.objective, options.restarts};
        best.final_grad_norm = std::sqrt(grad_norm);
        best.iterations = options.iterations;
      }
    }
  }
  return best;
}

std::vector<FrontierPoint> FrontierSweep(const DiscreteSystem& sys, const ChannelSpec& spec,
                                         const std::vector<double>& lambdas,
                                         const OracleOptions& options) {
  std::vector<FrontierPoint> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    out.push_back(OptimizeExact(sys, spec, lambda, options).point);
  }
  return out;
}

}  // namespace wiretap
