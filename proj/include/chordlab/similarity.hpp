#pragma once

// Similarity-weighted soft targets.
//
// A distance matrix D becomes a similarity matrix M(i,j) = 1 / (D(i,j) + K),
// normalised by its maximum. A one-hot target times the normalised matrix is
// the matching row, which is used as a multi-label target for
// cross-entropy training.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chordlab/alphabets.hpp"
#include "chordlab/matrix.hpp"

namespace chordlab {

class NonPositiveK : public std::invalid_argument {
 public:
  explicit NonPositiveK(double k)
      : std::invalid_argument("smoothing constant K must be positive, got " + std::to_string(k)) {}
};

class AsymmetricInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LengthMismatch : public std::invalid_argument {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b)) {}
};

inline constexpr double kLogClamp = 1e-12;

struct SimilarityMatrix {
  Matrix entries;
  double k = 1.0;
  bool normalized = false;

  std::size_t size() const { return entries.rows(); }
};

inline SimilarityMatrix build_similarity(const Matrix& dist, double k = 1.0) {
  if (!(k > 0.0)) throw NonPositiveK(k);
  if (dist.rows() != dist.cols()) {
    throw AsymmetricInput("distance matrix is not square (" + std::to_string(dist.rows()) + "x" +
                          std::to_string(dist.cols()) + ")");
  }
  const std::size_t n = dist.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist(i, j) != dist(j, i)) {
        throw AsymmetricInput("distance matrix not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
  }

  SimilarityMatrix out{Matrix(n, n), k, true};
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.entries(i, j) = 1.0 / (dist(i, j) + k);
      peak = std::max(peak, out.entries(i, j));
    }
  }
  for (double& v : out.entries.data()) v /= peak;
  return out;
}

struct TargetDistribution {
  std::vector<double> weights;
  int source = 0;
};

struct PredictionDistribution {
  std::vector<double> probabilities;
};

// Row `index` of the normalised matrix. With `renormalize` the row is scaled
// to sum to one.
inline TargetDistribution soft_target(int index, const SimilarityMatrix& sim,
                                      bool renormalize = false) {
  if (index < 0 || static_cast<std::size_t>(index) >= sim.size()) {
    throw std::out_of_range("class index " + std::to_string(index) +
                            " outside similarity matrix of size " + std::to_string(sim.size()));
  }
  auto row = sim.entries.row(static_cast<std::size_t>(index));
  TargetDistribution t{std::vector<double>(row.begin(), row.end()), index};
  if (renormalize) {
    double total = std::accumulate(t.weights.begin(), t.weights.end(), 0.0);
    for (double& w : t.weights) w /= total;
  }
  return t;
}

inline TargetDistribution soft_target(const ChordClass& cls, const SimilarityMatrix& sim,
                                      bool renormalize = false) {
  if (static_cast<std::size_t>(alphabet_size(cls.alphabet())) != sim.size()) {
    throw IndexOutOfAlphabet(cls.index(), cls.alphabet());
  }
  return soft_target(cls.index(), sim, renormalize);
}

inline TargetDistribution one_hot(int index, std::size_t size) {
  TargetDistribution t{std::vector<double>(size, 0.0), index};
  t.weights.at(static_cast<std::size_t>(index)) = 1.0;
  return t;
}

// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

// -sum_j target_j * log(pred_j), with pred clamped below at kLogClamp.
inline double weighted_loss(std::span<const double> target, std::span<const double> pred) {
  if (target.size() != pred.size()) throw LengthMismatch(target.size(), pred.size());
  double loss = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j] == 0.0) continue;
    loss -= target[j] * std::log(std::max(pred[j], kLogClamp));
  }
  return loss;
}

inline double weighted_loss(const TargetDistribution& target, const PredictionDistribution& pred) {
  return weighted_loss(target.weights, pred.probabilities);
}

// d loss / d logits for loss = weighted_loss(target, softmax(logits)):
// sum(target) * softmax(logits) - target.
inline std::vector<double> loss_gradient(std::span<const double> target,
                                         std::span<const double> logits) {
  if (target.size() != logits.size()) throw LengthMismatch(target.size(), logits.size());
  const double mass = std::accumulate(target.begin(), target.end(), 0.0);
  auto grad = softmax(logits);
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = mass * grad[j] - target[j];
  return grad;
}

}  // namespace chordlab
