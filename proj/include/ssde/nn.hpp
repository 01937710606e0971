#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ssde/error.hpp"
#include "ssde/matrix.hpp"
#include "ssde/rng.hpp"
#include "ssde/spectrum.hpp"
#include "ssde/svd.hpp"

namespace ssde::nn {

// From-scratch MLP with manual backpropagation, trained by minibatch SGD on
// synthetic data. Emits the weight snapshots, per-example gradients and
// spectral trajectories the rest of the toolkit consumes.

enum class Activation { Tanh, Relu, Identity };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

inline Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "identity") return Activation::Identity;
  throw DomainError("unknown activation: " + name);
}

inline double act_eval(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: return std::tanh(z);
    case Activation::Relu: return z > 0.0 ? z : 0.0;  // subgradient at 0 is 0
    case Activation::Identity: return z;
  }
  return z;
}

inline double act_deriv(Activation a, double z) {
  switch (a) {
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

// Layer weights W[l] map dims[l] -> dims[l+1]; hidden layers apply the
// configured activation, the output layer is linear.
struct MLP {
  std::vector<Matrix> W;
  std::vector<Vector> b;
  Activation activation = Activation::Tanh;

  int layers() const { return static_cast<int>(W.size()); }
  bool is_output(int layer) const { return layer + 1 == layers(); }
};

// W ~ N(0, 1/fan_in), b = 0
inline MLP init_mlp(const std::vector<int>& dims, Activation act, RngStream& rng) {
  if (dims.size() < 2) throw DomainError("init_mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw DomainError("init_mlp: dims must be positive");
  }
  MLP mlp;
  mlp.activation = act;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l], fan_out = dims[l + 1];
    mlp.W.push_back(gaussian_matrix(fan_out, fan_in, rng, 1.0 / std::sqrt(fan_in)));
    mlp.b.push_back(Vector::Zero(fan_out));
  }
  return mlp;
}

// Activations of one batched forward pass (columns are examples). a[0] is the
// input; z[l], a[l+1] belong to layer l.
struct ForwardCache {
  std::vector<Matrix> a;
  std::vector<Matrix> z;
};

inline ForwardCache forward(const MLP& mlp, const Matrix& input) {
  if (input.rows() != mlp.W.front().cols()) throw DomainError("forward: input dimension mismatch");
  ForwardCache cache;
  cache.a.reserve(static_cast<std::size_t>(mlp.layers()) + 1);
  cache.z.reserve(static_cast<std::size_t>(mlp.layers()));
  cache.a.push_back(input);
  for (int l = 0; l < mlp.layers(); ++l) {
    Matrix z = mlp.W[static_cast<std::size_t>(l)] * cache.a.back();
    z.colwise() += mlp.b[static_cast<std::size_t>(l)];
    Matrix a = z;
    if (!mlp.is_output(l)) {
      a = z.unaryExpr([&](double v) { return act_eval(mlp.activation, v); });
    }
    cache.z.push_back(std::move(z));
    cache.a.push_back(std::move(a));
  }
  return cache;
}

struct Grads {
  std::vector<Matrix> dW;
  std::vector<Vector> db;
};

// Error-signal recursion: delta_L = dL/da_L (elementwise) f'(z_L), then
// delta_l = (W_{l+1}^T delta_{l+1}) (elementwise) f'(z_l);
// dL/dW_l = delta_l a_{l-1}^T and dL/db_l = delta_l, summed over the batch.
inline Grads backprop(const MLP& mlp, const ForwardCache& cache, const Matrix& loss_grad) {
  const int L = mlp.layers();
  if (static_cast<int>(cache.z.size()) != L) throw DomainError("backprop: stale cache");
  if (loss_grad.rows() != cache.a.back().rows() || loss_grad.cols() != cache.a.back().cols()) {
    throw DomainError("backprop: loss gradient shape mismatch");
  }
  Grads g;
  g.dW.resize(static_cast<std::size_t>(L));
  g.db.resize(static_cast<std::size_t>(L));
  Matrix delta = loss_grad;  // output layer is linear, f' = 1
  for (int l = L - 1; l >= 0; --l) {
    if (!mlp.is_output(l)) {
      delta = delta.cwiseProduct(cache.z[static_cast<std::size_t>(l)].unaryExpr(
          [&](double v) { return act_deriv(mlp.activation, v); }));
    }
    g.dW[static_cast<std::size_t>(l)] = delta * cache.a[static_cast<std::size_t>(l)].transpose();
    g.db[static_cast<std::size_t>(l)] = delta.rowwise().sum();
    if (l > 0) delta = mlp.W[static_cast<std::size_t>(l)].transpose() * delta;
  }
  return g;
}

// ---- losses ----

struct LossEval {
  double value = 0.0;
  Matrix grad;  // d(mean loss)/d(output)
};

inline LossEval softmax_xent(const Matrix& logits, const std::vector<int>& labels) {
  const int B = static_cast<int>(logits.cols());
  if (static_cast<int>(labels.size()) != B) throw DomainError("softmax_xent: label count mismatch");
  LossEval out;
  out.grad.resize(logits.rows(), logits.cols());
  for (int c = 0; c < B; ++c) {
    const double zmax = logits.col(c).maxCoeff();
    Vector e = (logits.col(c).array() - zmax).exp();
    const double zsum = e.sum();
    out.value += -(logits(labels[static_cast<std::size_t>(c)], c) - zmax - std::log(zsum));
    out.grad.col(c) = e / zsum;
    out.grad(labels[static_cast<std::size_t>(c)], c) -= 1.0;
  }
  out.value /= B;
  out.grad /= static_cast<double>(B);
  return out;
}

inline LossEval squared_loss(const Matrix& output, const Matrix& targets) {
  if (output.rows() != targets.rows() || output.cols() != targets.cols()) {
    throw DomainError("squared_loss: shape mismatch");
  }
  const double B = static_cast<double>(output.cols());
  LossEval out;
  out.grad = (output - targets) / B;
  out.value = 0.5 * (output - targets).squaredNorm() / B;
  return out;
}

// ---- datasets ----

struct Dataset {
  Matrix X;                 // dim x N
  Matrix targets;           // out x N (regression)
  std::vector<int> labels;  // N (classification)
  bool classification = true;

  int size() const { return static_cast<int>(X.cols()); }
};

// Well-separated Gaussian blobs: unit-vector class means at radius 2.5 with
// per-entry noise 1/sqrt(dim), so noise norm ~ 1 regardless of dimension.
inline Dataset make_blobs(int count, int dim, int classes, RngStream& rng) {
  if (count < classes || classes < 2 || dim < 1) throw DomainError("make_blobs: bad sizes");
  Matrix means(dim, classes);
  for (int c = 0; c < classes; ++c) {
    Vector v = gaussian_matrix(dim, 1, rng);
    means.col(c) = 2.5 * v / v.norm();
  }
  Dataset ds;
  ds.classification = true;
  ds.X.resize(dim, count);
  ds.labels.resize(static_cast<std::size_t>(count));
  const double noise = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < count; ++i) {
    const int c = i % classes;
    ds.labels[static_cast<std::size_t>(i)] = c;
    ds.X.col(i) = means.col(c) + noise * gaussian_matrix(dim, 1, rng).col(0);
  }
  return ds;
}

// Targets from a fixed random tanh teacher net dim -> 32 -> out.
inline Dataset make_teacher_regression(int count, int dim, int out_dim, RngStream& rng) {
  if (count < 2 || dim < 1 || out_dim < 1) throw DomainError("make_teacher_regression: bad sizes");
  MLP teacher = init_mlp({dim, 32, out_dim}, Activation::Tanh, rng);
  Dataset ds;
  ds.classification = false;
  ds.X = gaussian_matrix(dim, count, rng);
  ds.targets = forward(teacher, ds.X).a.back();
  return ds;
}

// ---- training ----

struct TrainConfig {
  std::vector<int> arch;  // includes input and output dims
  std::string data = "blobs";
  int dataset_size = 512;
  int batch = 32;
  double eta = 5e-4;
  long steps = 800;
  int record_stride = 10;       // spectra every this many steps (and step 0, final)
  int grad_stride = 0;          // minibatch-gradient dumps; 0 = off
  int per_example_stride = 0;   // per-example gradient dumps; 0 = off
  int per_example_count = 64;   // examples 0..count-1 of the dataset
  Activation activation = Activation::Tanh;
  std::uint64_t seed = 1;
};

// Streaming outputs; any sink may be empty. Layer indices are 1-based.
struct TrainSinks {
  std::function<void(long step, double loss)> loss;
  std::function<void(int layer, const SpectrumSnapshot&)> spectrum;
  std::function<void(long step, int layer, const Matrix& grad)> minibatch_grad;
  std::function<void(long step, int layer, int example, const Matrix& grad)> per_example_grad;
};

struct TrainRecord {
  TrainConfig config;
  std::vector<double> losses;
  std::vector<std::vector<SpectrumSnapshot>> spectra;  // [layer-1]
  MLP final_mlp;
  bool diverged = false;
  long steps_run = 0;
};

inline SpectrumSnapshot record_spectrum(const Matrix& W) {
  SpectrumSnapshot snap;
  Vector s = singular_values(W);  // throws DomainError on non-finite entries
  snap.values.assign(s.data(), s.data() + s.size());
  return snap;
}

inline SvdResult record_spectrum_with_vectors(const Matrix& W) { return svd(W); }

inline Dataset make_dataset(const TrainConfig& config, RngStream& rng) {
  const int in_dim = config.arch.front(), out_dim = config.arch.back();
  if (config.data == "blobs") return make_blobs(config.dataset_size, in_dim, out_dim, rng);
  if (config.data == "teacher") {
    return make_teacher_regression(config.dataset_size, in_dim, out_dim, rng);
  }
  throw DomainError("unknown dataset: " + config.data);
}

// Minibatch SGD, sampling without replacement per epoch (reshuffled).
// Deterministic given config.seed. Gradient dumps happen before the update,
// so a dump at step t is the gradient at the step-t weights.
inline TrainRecord sgd_train(const TrainConfig& config, const TrainSinks& sinks = {}) {
  if (config.arch.size() < 2) throw DomainError("sgd_train: arch needs >= 2 dims");
  if (config.batch < 1 || config.batch > config.dataset_size) {
    throw DomainError("sgd_train: batch size exceeds dataset");
  }
  if (config.steps < 0) throw DomainError("sgd_train: steps must be >= 0");
  if (!(config.eta >= 0.0)) throw DomainError("sgd_train: eta must be >= 0");

  RngStream data_rng(config.seed, "dataset");
  RngStream init_rng(config.seed, "init");
  RngStream shuffle_rng(config.seed, "shuffle");
  Dataset ds = make_dataset(config, data_rng);
  MLP mlp = init_mlp(config.arch, config.activation, init_rng);

  TrainRecord record;
  record.config = config;
  record.spectra.resize(mlp.W.size());

  auto emit_spectra = [&](long step) {
    for (int l = 0; l < mlp.layers(); ++l) {
      SpectrumSnapshot snap = record_spectrum(mlp.W[static_cast<std::size_t>(l)]);
      snap.step = step;
      record.spectra[static_cast<std::size_t>(l)].push_back(snap);
      if (sinks.spectrum) sinks.spectrum(l + 1, snap);
    }
  };
  auto emit_per_example = [&](long step) {
    if (!sinks.per_example_grad) return;
    const int count = std::min(config.per_example_count, ds.size());
    for (int e = 0; e < count; ++e) {
      ForwardCache cache = forward(mlp, ds.X.col(e));
      LossEval loss =
          ds.classification
              ? softmax_xent(cache.a.back(), {ds.labels[static_cast<std::size_t>(e)]})
              : squared_loss(cache.a.back(), ds.targets.col(e));
      Grads g = backprop(mlp, cache, loss.grad);
      for (int l = 0; l < mlp.layers(); ++l) {
        sinks.per_example_grad(step, l + 1, e, g.dW[static_cast<std::size_t>(l)]);
      }
    }
  };

  emit_spectra(0);

  std::vector<int> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), 0);
  int cursor = ds.size();  // forces a shuffle on first use

  Matrix batch_x(ds.X.rows(), config.batch);
  Matrix batch_t;
  std::vector<int> batch_labels(static_cast<std::size_t>(config.batch));
  if (!ds.classification) batch_t.resize(ds.targets.rows(), config.batch);

  for (long step = 0; step < config.steps; ++step) {
    if (cursor + config.batch > ds.size()) {
      for (int i = ds.size() - 1; i > 0; --i) {
        const int j = static_cast<int>(shuffle_rng.uniform() * (i + 1));
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(std::min(j, i))]);
      }
      cursor = 0;
    }
    for (int i = 0; i < config.batch; ++i) {
      const int idx = order[static_cast<std::size_t>(cursor + i)];
      batch_x.col(i) = ds.X.col(idx);
      if (ds.classification) {
        batch_labels[static_cast<std::size_t>(i)] = ds.labels[static_cast<std::size_t>(idx)];
      } else {
        batch_t.col(i) = ds.targets.col(idx);
      }
    }
    cursor += config.batch;

    ForwardCache cache = forward(mlp, batch_x);
    LossEval loss = ds.classification ? softmax_xent(cache.a.back(), batch_labels)
                                      : squared_loss(cache.a.back(), batch_t);
    if (!std::isfinite(loss.value)) {
      record.diverged = true;
      record.steps_run = step;
      record.final_mlp = mlp;
      return record;
    }
    record.losses.push_back(loss.value);
    if (sinks.loss) sinks.loss(step, loss.value);

    Grads g = backprop(mlp, cache, loss.grad);
    if (config.grad_stride > 0 && step % config.grad_stride == 0 && sinks.minibatch_grad) {
      for (int l = 0; l < mlp.layers(); ++l) {
        sinks.minibatch_grad(step, l + 1, g.dW[static_cast<std::size_t>(l)]);
      }
    }
    if (config.per_example_stride > 0 && step % config.per_example_stride == 0) {
      emit_per_example(step);
    }

    for (int l = 0; l < mlp.layers(); ++l) {
      mlp.W[static_cast<std::size_t>(l)] -= config.eta * g.dW[static_cast<std::size_t>(l)];
      mlp.b[static_cast<std::size_t>(l)] -= config.eta * g.db[static_cast<std::size_t>(l)];
    }

    const long next = step + 1;
    if (next % config.record_stride == 0 || next == config.steps) emit_spectra(next);
  }
  record.steps_run = config.steps;
  record.final_mlp = mlp;
  return record;
}

// ---- learning-rate sweep ----

struct SweepRow {
  double eta = 0.0;
  std::vector<double> spread;  // per layer: sigma_max - sigma_med of final spectrum
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> slopes;  // per layer, log-log LS over non-divergent rows; empty if < 2
};

inline double spectrum_spread(const SpectrumSnapshot& snap) {
  const auto& v = snap.values;
  const std::size_t n = v.size();
  const double med = (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return v.front() - med;
}

// Trains an identical-seed model per learning rate and reports the final
// spectral spread per layer plus a log-log slope per layer. Divergent rates
// are recorded and excluded from the slope fit.
inline SweepResult lr_sweep(const TrainConfig& base, const std::vector<double>& etas) {
  if (etas.empty()) throw DomainError("lr_sweep: need at least one eta");
  SweepResult out;
  out.rows.resize(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) {
    TrainConfig cfg = base;
    cfg.eta = etas[i];
    cfg.record_stride = static_cast<int>(std::max<long>(base.steps, 1));
    TrainRecord rec = sgd_train(cfg);
    SweepRow& row = out.rows[i];
    row.eta = etas[i];
    row.diverged = rec.diverged;
    if (!rec.diverged) {
      for (const auto& layer : rec.spectra) row.spread.push_back(spectrum_spread(layer.back()));
    }
  }
  const std::size_t layers = base.arch.size() - 1;
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < layers; ++l) {
    lx.clear();
    ly.clear();
    for (const auto& row : out.rows) {
      if (row.diverged || row.spread[l] <= 0.0) continue;
      lx.push_back(std::log(row.eta));
      ly.push_back(std::log(row.spread[l]));
    }
    if (lx.size() < 2) {
      out.slopes.clear();
      return out;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.slopes.push_back(sxy / sxx);
  }
  return out;
}

}  // namespace ssde::nn
