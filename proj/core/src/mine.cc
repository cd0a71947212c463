#include "wiretap/mine.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "wiretap/optimizer.h"

namespace wiretap {

MineNet::MineNet(std::size_t classes, std::size_t y_width,
                 const std::vector<std::size_t>& hidden, Rng& rng)
    : classes_(classes), y_width_(y_width),
      net_(MakeMlp("mine", classes + y_width, hidden, 1, Activation::kIdentity)) {
  net_.Initialize(rng);
}

Tensor MineNet::Inputs(std::span<const int> t, const Tensor& y,
                       std::span<const std::size_t> y_rows) const {
  Tensor in = Tensor::Matrix(t.size(), classes_ + y_width_);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto label = static_cast<std::size_t>(t[i]);
    if (label >= classes_) throw std::out_of_range("MINE label out of range");
    in.at(i, label) = 1.0;
    auto src = y.row(y_rows[i]);
    std::copy(src.begin(), src.end(), in.row(i).begin() + static_cast<std::ptrdiff_t>(classes_));
  }
  return in;
}

namespace {

// DV objective (nats) on a fixed split: joint pairs as given, the marginal
// term averaged over every class weighted by its empirical frequency.
double HoldoutObjective(MineNet& net, std::span<const int> t, const Tensor& y,
                        std::span<const std::size_t> rows,
                        const std::vector<double>& class_freq) {
  const std::size_t m = rows.size();
  const std::size_t k = net.classes();
  std::vector<int> labels(m * (k + 1));
  std::vector<std::size_t> y_rows(m * (k + 1));
  for (std::size_t i = 0; i < m; ++i) {
    labels[i] = t[rows[i]];
    y_rows[i] = rows[i];
    for (std::size_t c = 0; c < k; ++c) {
      labels[m + i * k + c] = static_cast<int>(c);
      y_rows[m + i * k + c] = rows[i];
    }
  }
  const Tensor f = net.network().Forward(net.Inputs(labels, y, y_rows), false);
  double joint = 0.0;
  for (std::size_t i = 0; i < m; ++i) joint += f[i];
  joint /= static_cast<double>(m);
  double fmax = -INFINITY;
  for (std::size_t j = m; j < f.size(); ++j) fmax = std::max(fmax, f[j]);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      z += class_freq[c] * std::exp(f[m + i * k + c] - fmax);
    }
  }
  const double v = joint - (fmax + std::log(z / static_cast<double>(m)));
  if (!std::isfinite(v)) throw NumericError("MINE holdout objective is not finite");
  return v;
}

}  // namespace

MiReport MineEstimate(MineNet& net, std::span<const int> t, const Tensor& y,
                      const MineConfig& config, Rng& rng) {
  if (t.size() != y.rows()) throw std::invalid_argument("MINE: t and y sizes differ");
  if (y.cols() != net.y_width()) throw std::invalid_argument("MINE: y width mismatch");
  if (t.size() < config.min_samples) {
    throw std::invalid_argument("MINE needs at least " + std::to_string(config.min_samples) +
                                " samples, got " + std::to_string(t.size()));
  }
  if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 1.0)) {
    throw std::invalid_argument("MINE holdout fraction must be in [0, 1)");
  }
  MiReport report;
  report.method = MiMethod::kMine;
  report.sample_count = t.size();

  std::vector<std::size_t> all(t.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> holdout;
  if (config.holdout_fraction > 0.0) {
    std::shuffle(all.begin(), all.end(), rng);
    const auto h = static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(all.size()));
    holdout.assign(all.end() - static_cast<std::ptrdiff_t>(h), all.end());
    all.resize(all.size() - h);
  }
  std::vector<double> class_freq(net.classes(), 0.0);
  for (int label : t) {
    if (label < 0 || static_cast<std::size_t>(label) >= net.classes()) {
      throw std::out_of_range("MINE label out of range");
    }
    class_freq[static_cast<std::size_t>(label)] += 1.0 / static_cast<double>(t.size());
  }

  std::vector<std::size_t>& order = all;
  const std::size_t n = order.size();
  const std::size_t batch = std::min(config.batch_size, n);
  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8};
  double ema = 0.0;
  bool ema_init = false;
  std::deque<double> recent;
  double best_holdout = -INFINITY;

  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start + batch <= n; start += batch) {
        std::span<const std::size_t> rows(order.data() + start, batch);
        std::vector<int> t_joint(batch), t_marg(batch);
        for (std::size_t i = 0; i < batch; ++i) t_joint[i] = t[rows[i]];
        t_marg = t_joint;
        std::shuffle(t_marg.begin(), t_marg.end(), rng);

        Tensor in(std::vector<std::size_t>{2 * batch, net.classes() + net.y_width()});
        {
          Tensor a = net.Inputs(t_joint, y, rows);
          Tensor b = net.Inputs(t_marg, y, rows);
          std::copy(a.values().begin(), a.values().end(), in.values().begin());
          std::copy(b.values().begin(), b.values().end(),
                    in.values().begin() + static_cast<std::ptrdiff_t>(a.size()));
        }
        Tensor f = net.network().Forward(in, true);

        double joint_mean = 0.0;
        for (std::size_t i = 0; i < batch; ++i) joint_mean += f[i];
        joint_mean /= static_cast<double>(batch);
        double fmax = -INFINITY;
        for (std::size_t i = 0; i < batch; ++i) fmax = std::max(fmax, f[batch + i]);
        double sum_exp = 0.0;
        for (std::size_t i = 0; i < batch; ++i) sum_exp += std::exp(f[batch + i] - fmax);
        const double log_mean_exp = fmax + std::log(sum_exp / static_cast<double>(batch));
        const double dv = joint_mean - log_mean_exp;
        if (!std::isfinite(dv)) throw NumericError("MINE objective is not finite");

        const double mean_exp = std::exp(log_mean_exp);
        ema = ema_init ? config.ema_decay * ema + (1.0 - config.ema_decay) * mean_exp
                       : mean_exp;
        ema_init = true;

        // Descend on -(joint_mean - log E[exp f]) with the partition
        // gradient divided by the moving average.
        Tensor grad(f.shape());
        const double b = static_cast<double>(batch);
        for (std::size_t i = 0; i < batch; ++i) {
          grad[i] = -1.0 / b;
          grad[batch + i] = std::exp(f[batch + i]) / (b * ema);
        }
        net.network().Backward(grad);
        AdamStep(net.network().params(), adam);

        recent.push_back(dv / std::log(2.0));
        if (recent.size() > config.smoothing_window) recent.pop_front();
      }
      if (!holdout.empty()) {
        best_holdout = std::max(best_holdout, HoldoutObjective(net, t, y, holdout, class_freq));
      }
    }
  } catch (const NumericError& e) {
    report.failed = true;
    report.note = std::string("estimation failure: ") + e.what();
    report.value_bits = std::nan("");
    return report;
  }
  if (recent.empty()) {
    report.failed = true;
    report.note = "estimation failure: no optimization steps ran";
    report.value_bits = std::nan("");
    return report;
  }
  const double train_bits =
      std::accumulate(recent.begin(), recent.end(), 0.0) / static_cast<double>(recent.size());
  if (holdout.empty()) {
    report.value_bits = train_bits;
  } else {
    report.value_bits = best_holdout / std::log(2.0);
    report.note = "train objective " + std::to_string(train_bits) + " bits";
  }
  return report;
}

}  // namespace wiretap
