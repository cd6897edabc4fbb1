#pragma once

// A small trainable frame classifier.
//
// The network is a stack of hidden layers (full 2D convolutions and dense
// layers, each followed by tanh and optional dropout) and a dense output
// layer of alphabet size. Training minimises the weighted cross-entropy of
// similarity.hpp against one-hot or soft targets.
//
// Convolution follows
//
//   (A * B)(i, j) = sum_r sum_s A(r, s) B(i - r, j - s)
//
// over every (i, j) where the sum can be non-zero, so a T x F input and a
// U x V kernel give a (T + U - 1) x (F + V - 1) map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordlab/alphabets.hpp"
#include "chordlab/distances.hpp"
#include "chordlab/matrix.hpp"
#include "chordlab/similarity.hpp"

namespace chordlab {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyDataset : public std::invalid_argument {
 public:
  EmptyDataset() : std::invalid_argument("dataset has no frames") {}
};

// Full 2D convolution of `input` with `kernel`.
inline Matrix full_convolve(const Matrix& input, const Matrix& kernel) {
  if (input.empty() || kernel.empty()) throw ShapeError("convolution operands must be non-empty");
  const std::size_t t = input.rows(), f = input.cols();
  const std::size_t u = kernel.rows(), v = kernel.cols();
  Matrix out(t + u - 1, f + v - 1);
  for (std::size_t r = 0; r < t; ++r) {
    for (std::size_t s = 0; s < f; ++s) {
      const double a = input(r, s);
      if (a == 0.0) continue;
      for (std::size_t p = 0; p < u; ++p) {
        for (std::size_t q = 0; q < v; ++q) out(r + p, s + q) += a * kernel(p, q);
      }
    }
  }
  return out;
}

// count x height x width kernel tensor.
struct ConvKernelSet {
  std::size_t count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  ConvKernelSet() = default;
  ConvKernelSet(std::size_t m, std::size_t u, std::size_t v)
      : count(m), height(u), width(v), values(m * u * v, 0.0) {}

  Matrix kernel(std::size_t m) const {
    Matrix k(height, width);
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(m * height * width), height * width,
                k.data().begin());
    return k;
  }
};

// One feature map per kernel.
inline std::vector<Matrix> conv2d(const Matrix& input, const ConvKernelSet& kernels) {
  if (kernels.count == 0 || kernels.height == 0 || kernels.width == 0 ||
      kernels.values.size() != kernels.count * kernels.height * kernels.width) {
    throw ShapeError("malformed kernel set");
  }
  std::vector<Matrix> maps;
  maps.reserve(kernels.count);
  for (std::size_t m = 0; m < kernels.count; ++m) {
    maps.push_back(full_convolve(input, kernels.kernel(m)));
  }
  return maps;
}

enum class LayerKind { kConv2d, kDense };

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  int size = 0;  // kernel count or unit count
  int kernel_height = 1;
  int kernel_width = 1;

  static LayerSpec dense(int units) { return {LayerKind::kDense, units, 1, 1}; }
  static LayerSpec conv(int kernels, int height, int width) {
    return {LayerKind::kConv2d, kernels, height, width};
  }
};

struct ModelSpec {
  AlphabetId alphabet = AlphabetId::kA0;
  int input_height = 1;
  int input_width = 12;
  std::vector<LayerSpec> hidden;

  int classes() const { return alphabet_size(alphabet); }

  // Softmax regression on a chroma row.
  static ModelSpec linear(AlphabetId a) { return {a, 1, 12, {}}; }

  static ModelSpec dense(AlphabetId a, std::vector<int> units, int height = 1, int width = 12) {
    ModelSpec s{a, height, width, {}};
    for (int n : units) s.hidden.push_back(LayerSpec::dense(n));
    return s;
  }

  // Three convolutions followed by two dense layers (the second being the
  // output layer), on a time x frequency patch.
  static ModelSpec convolutional(AlphabetId a, int height, int width, int kernels = 8,
                                 int kernel_size = 3, int dense_units = 64) {
    return {a,
            height,
            width,
            {LayerSpec::conv(kernels, kernel_size, kernel_size),
             LayerSpec::conv(kernels, kernel_size, kernel_size),
             LayerSpec::conv(kernels, kernel_size, kernel_size), LayerSpec::dense(dense_units)}};
  }
};

struct TensorShape {
  int channels = 1;
  int height = 1;
  int width = 1;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(width);
  }
};

// Parameter layout of one layer inside Model::params().
struct LayerLayout {
  LayerKind kind;
  TensorShape in;
  TensorShape out;
  int kernel_height = 1;
  int kernel_width = 1;
  std::size_t weight_offset = 0;
  std::size_t weight_count = 0;
  std::size_t bias_offset = 0;
};

// Parameters live in one flat vector; layers() says where each layer's
// weights and biases are.
class Model {
 public:
  Model() = default;

  // All parameters zero.
  explicit Model(ModelSpec spec) : spec_(std::move(spec)) {
    if (spec_.input_height < 1 || spec_.input_width < 1) throw ShapeError("empty input shape");
    TensorShape shape{1, spec_.input_height, spec_.input_width};
    std::size_t offset = 0;
    auto add = [&](LayerKind kind, TensorShape out, int kh, int kw, std::size_t weights) {
      LayerLayout l{kind, shape, out, kh, kw, offset, weights, offset + weights};
      const std::size_t biases =
          kind == LayerKind::kDense ? out.size() : static_cast<std::size_t>(out.channels);
      offset += weights + biases;
      layers_.push_back(l);
      shape = out;
    };
    for (const auto& h : spec_.hidden) {
      if (h.size < 1 || h.kernel_height < 1 || h.kernel_width < 1) {
        throw ShapeError("layer dimensions must be >= 1");
      }
      if (h.kind == LayerKind::kConv2d) {
        TensorShape out{h.size, shape.height + h.kernel_height - 1,
                        shape.width + h.kernel_width - 1};
        add(LayerKind::kConv2d, out, h.kernel_height, h.kernel_width,
            static_cast<std::size_t>(h.size * shape.channels * h.kernel_height * h.kernel_width));
      } else {
        add(LayerKind::kDense, {1, 1, h.size}, 1, 1, static_cast<std::size_t>(h.size) * shape.size());
      }
    }
    add(LayerKind::kDense, {1, 1, spec_.classes()}, 1, 1,
        static_cast<std::size_t>(spec_.classes()) * shape.size());
    params_.assign(offset, 0.0);
  }

  // Glorot-uniform weights, zero biases.
  static Model initialized(ModelSpec spec, std::uint64_t seed) {
    Model m(std::move(spec));
    std::mt19937_64 rng(seed);
    for (const auto& l : m.layers_) {
      double fan_in, fan_out;
      if (l.kind == LayerKind::kConv2d) {
        fan_in = static_cast<double>(l.in.channels * l.kernel_height * l.kernel_width);
        fan_out = static_cast<double>(l.out.channels * l.kernel_height * l.kernel_width);
      } else {
        fan_in = static_cast<double>(l.in.size());
        fan_out = static_cast<double>(l.out.size());
      }
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (std::size_t i = 0; i < l.weight_count; ++i) {
        m.params_[l.weight_offset + i] = limit * dist(rng);
      }
    }
    return m;
  }

  const ModelSpec& spec() const { return spec_; }
  const std::vector<LayerLayout>& layers() const { return layers_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t input_size() const { return layers_.front().in.size(); }
  int classes() const { return spec_.classes(); }

  bool operator==(const Model& o) const { return params_ == o.params_ && layers_.size() == o.layers_.size(); }

 private:
  ModelSpec spec_;
  std::vector<LayerLayout> layers_;
  std::vector<double> params_;
};

// Training-time perturbations; all off by default.
struct ForwardOptions {
  double input_noise_std = 0.0;
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
};

namespace detail {

struct ForwardCache {
  std::vector<std::vector<double>> inputs;  // input of each layer
  std::vector<std::vector<double>> hidden;  // tanh output of hidden layers, pre-dropout
  std::vector<std::vector<double>> masks;   // inverted-dropout scale, empty if none
  std::vector<double> logits;
};

inline void conv_forward(const LayerLayout& l, std::span<const double> p,
                         std::span<const double> x, std::vector<double>& y) {
  const int c_in = l.in.channels, h = l.in.height, w = l.in.width;
  const int u = l.kernel_height, v = l.kernel_width;
  const int oh = l.out.height, ow = l.out.width;
  y.assign(l.out.size(), 0.0);
  for (int m = 0; m < l.out.channels; ++m) {
    double* ym = y.data() + static_cast<std::ptrdiff_t>(m) * oh * ow;
    const double bias = p[l.bias_offset + static_cast<std::size_t>(m)];
    for (int i = 0; i < oh * ow; ++i) ym[i] = bias;
    for (int c = 0; c < c_in; ++c) {
      const double* xc = x.data() + static_cast<std::ptrdiff_t>(c) * h * w;
      const double* k = p.data() + l.weight_offset + static_cast<std::size_t>((m * c_in + c) * u * v);
      for (int r = 0; r < h; ++r) {
        for (int s = 0; s < w; ++s) {
          const double a = xc[r * w + s];
          if (a == 0.0) continue;
          for (int pu = 0; pu < u; ++pu) {
            for (int pv = 0; pv < v; ++pv) ym[(r + pu) * ow + (s + pv)] += a * k[pu * v + pv];
          }
        }
      }
    }
  }
}

inline void conv_backward(const LayerLayout& l, std::span<const double> p,
                          std::span<const double> x, std::span<const double> dy,
                          std::span<double> grad, std::vector<double>* dx) {
  const int c_in = l.in.channels, h = l.in.height, w = l.in.width;
  const int u = l.kernel_height, v = l.kernel_width;
  const int oh = l.out.height, ow = l.out.width;
  if (dx) dx->assign(l.in.size(), 0.0);
  for (int m = 0; m < l.out.channels; ++m) {
    const double* dym = dy.data() + static_cast<std::ptrdiff_t>(m) * oh * ow;
    double bias_grad = 0.0;
    for (int i = 0; i < oh * ow; ++i) bias_grad += dym[i];
    grad[l.bias_offset + static_cast<std::size_t>(m)] += bias_grad;
    for (int c = 0; c < c_in; ++c) {
      const double* xc = x.data() + static_cast<std::ptrdiff_t>(c) * h * w;
      const std::size_t k_off = l.weight_offset + static_cast<std::size_t>((m * c_in + c) * u * v);
      const double* k = p.data() + k_off;
      double* dk = grad.data() + k_off;
      double* dxc = dx ? dx->data() + static_cast<std::ptrdiff_t>(c) * h * w : nullptr;
      for (int r = 0; r < h; ++r) {
        for (int s = 0; s < w; ++s) {
          const double a = xc[r * w + s];
          double acc = 0.0;
          for (int pu = 0; pu < u; ++pu) {
            for (int pv = 0; pv < v; ++pv) {
              const double g = dym[(r + pu) * ow + (s + pv)];
              dk[pu * v + pv] += g * a;
              acc += g * k[pu * v + pv];
            }
          }
          if (dxc) dxc[r * w + s] += acc;
        }
      }
    }
  }
}

inline void dense_forward(const LayerLayout& l, std::span<const double> p,
                          std::span<const double> x, std::vector<double>& y) {
  const std::size_t n_in = l.in.size(), n_out = l.out.size();
  y.assign(n_out, 0.0);
  for (std::size_t o = 0; o < n_out; ++o) {
    const double* row = p.data() + l.weight_offset + o * n_in;
    double acc = p[l.bias_offset + o];
    for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

inline void dense_backward(const LayerLayout& l, std::span<const double> p,
                           std::span<const double> x, std::span<const double> dy,
                           std::span<double> grad, std::vector<double>* dx) {
  const std::size_t n_in = l.in.size(), n_out = l.out.size();
  if (dx) dx->assign(n_in, 0.0);
  for (std::size_t o = 0; o < n_out; ++o) {
    const double g = dy[o];
    grad[l.bias_offset + o] += g;
    if (g == 0.0) continue;
    const double* row = p.data() + l.weight_offset + o * n_in;
    double* drow = grad.data() + l.weight_offset + o * n_in;
    for (std::size_t i = 0; i < n_in; ++i) {
      drow[i] += g * x[i];
      if (dx) (*dx)[i] += g * row[i];
    }
  }
}

inline ForwardCache forward_cached(const Model& model, std::span<const double> frame,
                                   const ForwardOptions& opt) {
  if (frame.size() != model.input_size()) {
    throw ShapeError("frame has " + std::to_string(frame.size()) + " values, model expects " +
                     std::to_string(model.input_size()));
  }
  const auto& layers = model.layers();
  const auto p = model.params();
  ForwardCache cache;
  cache.inputs.resize(layers.size());
  cache.hidden.resize(layers.size() - 1);
  cache.masks.resize(layers.size() - 1);

  std::vector<double> x(frame.begin(), frame.end());
  if (opt.input_noise_std > 0.0 && opt.rng) {
    std::normal_distribution<double> noise(0.0, opt.input_noise_std);
    for (double& v : x) v += noise(*opt.rng);
  }
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& l = layers[li];
    cache.inputs[li] = std::move(x);
    std::vector<double> y;
    if (l.kind == LayerKind::kConv2d) {
      conv_forward(l, p, cache.inputs[li], y);
    } else {
      dense_forward(l, p, cache.inputs[li], y);
    }
    if (li + 1 == layers.size()) {
      cache.logits = std::move(y);
      break;
    }
    for (double& v : y) v = std::tanh(v);
    cache.hidden[li] = y;
    if (opt.dropout > 0.0 && opt.rng) {
      std::bernoulli_distribution keep(1.0 - opt.dropout);
      auto& mask = cache.masks[li];
      mask.resize(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        mask[i] = keep(*opt.rng) ? 1.0 / (1.0 - opt.dropout) : 0.0;
        y[i] *= mask[i];
      }
    }
    x = std::move(y);
  }
  return cache;
}

// Accumulates d loss / d params into `grad` given d loss / d logits.
inline void backward(const Model& model, const ForwardCache& cache, std::vector<double> delta,
                     std::span<double> grad) {
  const auto& layers = model.layers();
  const auto p = model.params();
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& l = layers[li];
    if (li + 1 < layers.size()) {
      const auto& a = cache.hidden[li];
      const auto& mask = cache.masks[li];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!mask.empty()) delta[i] *= mask[i];
        delta[i] *= 1.0 - a[i] * a[i];
      }
    }
    std::vector<double> dx;
    std::vector<double>* dx_ptr = li > 0 ? &dx : nullptr;
    if (l.kind == LayerKind::kConv2d) {
      conv_backward(l, p, cache.inputs[li], delta, grad, dx_ptr);
    } else {
      dense_backward(l, p, cache.inputs[li], delta, grad, dx_ptr);
    }
    delta = std::move(dx);
  }
}

}  // namespace detail

inline std::vector<double> logits(const Model& model, std::span<const double> frame,
                                  const ForwardOptions& opt = {}) {
  return detail::forward_cached(model, frame, opt).logits;
}

inline PredictionDistribution predict(const Model& model, std::span<const double> frame) {
  return {softmax(logits(model, frame))};
}

inline std::vector<PredictionDistribution> forward(const Model& model,
                                                   std::span<const std::vector<double>> batch) {
  std::vector<PredictionDistribution> out;
  out.reserve(batch.size());
  for (const auto& frame : batch) out.push_back(predict(model, frame));
  return out;
}

// Lowest index wins ties.
inline int argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

// Mean weighted loss over the batch; `grad` (resized to the parameter count)
// receives its gradient.
inline double loss_and_gradient(const Model& model, std::span<const std::vector<double>> frames,
                                std::span<const std::vector<double>> targets,
                                std::vector<double>& grad, const ForwardOptions& opt = {}) {
  if (frames.size() != targets.size()) throw LengthMismatch(frames.size(), targets.size());
  grad.assign(model.params().size(), 0.0);
  if (frames.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(frames.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto cache = detail::forward_cached(model, frames[i], opt);
    auto probs = softmax(cache.logits);
    loss += weighted_loss(targets[i], probs);
    auto delta = loss_gradient(targets[i], cache.logits);
    for (double& d : delta) d *= scale;
    detail::backward(model, cache, std::move(delta), grad);
  }
  return loss * scale;
}

// Labelled frames of one shape over one alphabet.
struct Dataset {
  AlphabetId alphabet = AlphabetId::kA0;
  int frame_height = 1;
  int frame_width = 12;
  std::vector<std::vector<double>> frames;
  std::vector<int> labels;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }

  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out{alphabet, frame_height, frame_width, {}, {}};
    for (std::size_t i : indices) {
      out.frames.push_back(frames[i]);
      out.labels.push_back(labels[i]);
    }
    return out;
  }
};

// Pitch-vector templates plus Gaussian noise, frames_per_class per class in
// class order. N frames are pure noise.
inline Dataset synth_dataset(AlphabetId alphabet, int frames_per_class, double noise_std,
                             std::uint64_t seed) {
  if (noise_std < 0.0) throw std::invalid_argument("noise std must be >= 0");
  if (frames_per_class < 0) throw std::invalid_argument("frames per class must be >= 0");
  Dataset ds{alphabet, 1, 12, {}, {}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  for (const auto& cls : enumerate_classes(alphabet)) {
    const auto bits = pitch_vector(cls);
    for (int k = 0; k < frames_per_class; ++k) {
      std::vector<double> frame(12);
      for (std::size_t pc = 0; pc < 12; ++pc) {
        frame[pc] = bits.test(pc) ? 1.0 : 0.0;
        if (noise_std > 0.0) frame[pc] += noise(rng);
      }
      ds.frames.push_back(std::move(frame));
      ds.labels.push_back(cls.index());
    }
  }
  return ds;
}

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Seeded shuffle, then the first train_fraction / validation_fraction of the
// frames go to train / validation and the rest to test.
inline DatasetSplit random_split(const Dataset& ds, double train_fraction,
                                 double validation_fraction, std::uint64_t seed) {
  if (train_fraction < 0.0 || validation_fraction < 0.0 ||
      train_fraction + validation_fraction > 1.0) {
    throw std::invalid_argument("split fractions must be non-negative and sum to <= 1");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = static_cast<double>(ds.size());
  const auto n_train = static_cast<std::size_t>(std::llround(n * train_fraction));
  const auto n_val = std::min(ds.size() - n_train,
                              static_cast<std::size_t>(std::llround(n * validation_fraction)));
  std::span<const std::size_t> all(order);
  return {ds.subset(all.subspan(0, n_train)), ds.subset(all.subspan(n_train, n_val)),
          ds.subset(all.subspan(n_train + n_val))};
}

// Independent random 60/20/20 resplits, one per repeat.
inline std::vector<DatasetSplit> repeated_random_splits(const Dataset& ds, int repeats,
                                                        std::uint64_t seed) {
  std::vector<DatasetSplit> out;
  std::mt19937_64 seeds(seed);
  for (int r = 0; r < repeats; ++r) out.push_back(random_split(ds, 0.6, 0.2, seeds()));
  return out;
}

enum class OptimizerKind { kAdam, kSgd };

struct TrainConfig {
  double learning_rate = 2e-5;
  int max_epochs = 1000;
  int plateau_patience = 50;
  double plateau_factor = 0.5;
  int early_stop_patience = 200;
  double input_noise_std = 0.0;
  double dropout = 0.0;
  int batch_size = 0;  // 0 trains on the full set each step
  OptimizerKind optimizer = OptimizerKind::kAdam;
  bool renormalize_targets = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (max_epochs < 1) throw std::invalid_argument("max epochs must be >= 1");
    if (plateau_patience < 1 || early_stop_patience < 1) {
      throw std::invalid_argument("patience values must be >= 1");
    }
    if (!(plateau_factor > 0.0 && plateau_factor <= 1.0)) {
      throw std::invalid_argument("plateau factor must be in (0, 1]");
    }
    if (input_noise_std < 0.0) throw std::invalid_argument("input noise std must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
    if (batch_size < 0) throw std::invalid_argument("batch size must be >= 0");
  }
};

// Tracks validation loss for learning-rate reduction and early stopping.
// A strictly lower loss counts as improvement and resets both counters; the
// plateau counter also resets after each reduction.
class PlateauMonitor {
 public:
  struct Decision {
    bool improved = false;
    bool reduce_lr = false;
    bool stop = false;
  };

  PlateauMonitor(int plateau_patience, int stop_patience)
      : plateau_patience_(plateau_patience), stop_patience_(stop_patience) {}

  Decision update(double loss) {
    Decision d;
    if (loss < best_) {
      best_ = loss;
      plateau_wait_ = 0;
      stop_wait_ = 0;
      d.improved = true;
      return d;
    }
    if (++plateau_wait_ >= plateau_patience_) {
      d.reduce_lr = true;
      plateau_wait_ = 0;
    }
    if (++stop_wait_ >= stop_patience_) d.stop = true;
    return d;
  }

  double best() const { return best_; }

 private:
  int plateau_patience_;
  int stop_patience_;
  int plateau_wait_ = 0;
  int stop_wait_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

class Adam {
 public:
  explicit Adam(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : m_(n, 0.0), v_(n, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<double> params, std::span<const double> grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
  }

 private:
  std::vector<double> m_, v_;
  double beta1_, beta2_, eps_;
  int t_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  Model best;  // highest validation accuracy seen
  Model last;
  int best_epoch = 0;
  bool early_stopped = false;
  std::vector<EpochRecord> history;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Targets for each label: similarity rows, or one-hot without a matrix.
inline std::vector<std::vector<double>> make_targets(const Dataset& ds,
                                                     const SimilarityMatrix* sim,
                                                     bool renormalize = false) {
  const auto n = static_cast<std::size_t>(alphabet_size(ds.alphabet));
  if (sim && sim->size() != n) {
    throw ShapeError("similarity matrix size " + std::to_string(sim->size()) +
                     " does not match alphabet size " + std::to_string(n));
  }
  std::vector<std::vector<double>> out;
  out.reserve(ds.size());
  for (int label : ds.labels) {
    out.push_back(sim ? soft_target(label, *sim, renormalize).weights : one_hot(label, n).weights);
  }
  return out;
}

inline Evaluation evaluate(const Model& model, const Dataset& ds,
                           std::span<const std::vector<double>> targets) {
  Evaluation e;
  if (ds.empty()) return e;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto probs = predict(model, ds.frames[i]).probabilities;
    e.loss += weighted_loss(targets[i], probs);
    if (argmax(probs) == ds.labels[i]) ++correct;
  }
  e.loss /= static_cast<double>(ds.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return e;
}

inline double accuracy(const Model& model, const Dataset& ds) {
  if (ds.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (argmax(predict(model, ds.frames[i]).probabilities) == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

// Trains `model` on `train_set`, monitoring `validation` (the training set
// when validation is empty). Soft targets come from `sim` when given.
inline TrainResult train(Model model, const Dataset& train_set, const Dataset& validation,
                         const SimilarityMatrix* sim, const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) throw EmptyDataset();
  const Dataset& val = validation.empty() ? train_set : validation;
  if (train_set.alphabet != model.spec().alphabet) {
    throw AlphabetMismatch(train_set.alphabet, model.spec().alphabet);
  }
  if (val.alphabet != train_set.alphabet) throw AlphabetMismatch(val.alphabet, train_set.alphabet);

  const auto train_targets = make_targets(train_set, sim, config.renormalize_targets);
  const auto val_targets = make_targets(val, sim, config.renormalize_targets);

  std::mt19937_64 rng(config.seed);
  ForwardOptions fopt{config.input_noise_std, config.dropout, &rng};
  Adam adam(model.params().size());
  PlateauMonitor monitor(config.plateau_patience, config.early_stop_patience);
  double lr = config.learning_rate;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = config.batch_size > 0
                                ? std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                                        train_set.size())
                                : train_set.size();

  TrainResult result{model, model, 0, false, {}};
  double best_accuracy = -1.0;
  std::vector<double> grad;
  std::vector<std::vector<double>> batch_frames, batch_targets;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (batch < train_set.size()) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      batch_frames.clear();
      batch_targets.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_frames.push_back(train_set.frames[order[i]]);
        batch_targets.push_back(train_targets[order[i]]);
      }
      loss_and_gradient(model, batch_frames, batch_targets, grad, fopt);
      if (config.optimizer == OptimizerKind::kAdam) {
        adam.step(model.params(), grad, lr);
      } else {
        auto p = model.params();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * grad[i];
      }
    }

    const auto tr = evaluate(model, train_set, train_targets);
    const auto va = evaluate(model, val, val_targets);
    result.history.push_back({epoch, tr.loss, tr.accuracy, va.loss, va.accuracy, lr});
    if (va.accuracy > best_accuracy) {
      best_accuracy = va.accuracy;
      result.best = model;
      result.best_epoch = epoch;
    }
    const auto decision = monitor.update(va.loss);
    if (decision.reduce_lr) lr *= config.plateau_factor;
    if (decision.stop) {
      result.early_stopped = true;
      break;
    }
  }
  result.last = std::move(model);
  return result;
}

}  // namespace chordlab
