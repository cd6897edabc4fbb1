#pragma once

// Chord distances.
//
//   D0  categorical: 0 for the same class, 1 otherwise.
//   D1  Tonnetz: shortest P/R/L path between the A0 triads of both chords,
//       plus a surcharge for each operand that had to be reduced to reach A0.
//   D2  Euclidean distance between 12-bit pitch-class vectors.
//
// Classes with no triad in A0 (N, and dim/aug/sus families) have no Tonnetz
// position. Their D1 distance to any other class is the largest finite
// chord-to-chord D1 in the same alphabet.

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>

#include "chordlab/alphabets.hpp"
#include "chordlab/matrix.hpp"

namespace chordlab {

using PitchVector = std::bitset<12>;

inline std::span<const int> quality_intervals(Quality q) {
  static constexpr int kMaj[] = {0, 4, 7};
  static constexpr int kMin[] = {0, 3, 7};
  static constexpr int kDim[] = {0, 3, 6};
  static constexpr int kAug[] = {0, 4, 8};
  static constexpr int kMaj6[] = {0, 4, 7, 9};
  static constexpr int kMin6[] = {0, 3, 7, 9};
  static constexpr int kMaj7[] = {0, 4, 7, 11};
  static constexpr int kMinMaj7[] = {0, 3, 7, 11};
  static constexpr int kMin7[] = {0, 3, 7, 10};
  static constexpr int kDom7[] = {0, 4, 7, 10};
  static constexpr int kDim7[] = {0, 3, 6, 9};
  static constexpr int kHdim7[] = {0, 3, 6, 10};
  static constexpr int kSus2[] = {0, 2, 7};
  static constexpr int kSus4[] = {0, 5, 7};
  switch (q) {
    case Quality::kMaj: return kMaj;
    case Quality::kMin: return kMin;
    case Quality::kDim: return kDim;
    case Quality::kAug: return kAug;
    case Quality::kMaj6: return kMaj6;
    case Quality::kMin6: return kMin6;
    case Quality::kMaj7: return kMaj7;
    case Quality::kMinMaj7: return kMinMaj7;
    case Quality::kMin7: return kMin7;
    case Quality::kDom7: return kDom7;
    case Quality::kDim7: return kDim7;
    case Quality::kHdim7: return kHdim7;
    case Quality::kSus2: return kSus2;
    case Quality::kSus4: return kSus4;
  }
  return {};
}

// Bit i is set iff pitch class i sounds. N is the zero vector.
inline PitchVector pitch_vector(const ChordLabel& label) {
  PitchVector v;
  if (label.is_no_chord()) return v;
  for (int step : quality_intervals(label.quality.value_or(Quality::kMaj))) {
    v.set(static_cast<std::size_t>((*label.root + step).value()));
  }
  return v;
}

inline PitchVector pitch_vector(const ChordClass& cls) { return pitch_vector(cls.label()); }

enum class DistanceKind { kD0, kD1, kD2 };

inline constexpr std::string_view distance_name(DistanceKind k) {
  switch (k) {
    case DistanceKind::kD0: return "D0";
    case DistanceKind::kD1: return "D1";
    case DistanceKind::kD2: return "D2";
  }
  return "?";
}

inline std::optional<DistanceKind> distance_from_name(std::string_view name) {
  for (auto k : {DistanceKind::kD0, DistanceKind::kD1, DistanceKind::kD2}) {
    if (distance_name(k) == name) return k;
  }
  return std::nullopt;
}

// How D2 treats the no-chord class.
enum class NoChordPolicy {
  kPitchVector,  // N is the zero pitch vector
  kMaxFinite,    // N is as far as the farthest pair of chords
};

struct DistanceOptions {
  double reduction_surcharge = 1.0;
  // false: a pair pays the surcharge once if either operand was reduced.
  bool surcharge_each_operand = true;
  NoChordPolicy d2_no_chord = NoChordPolicy::kPitchVector;
};

// A major or minor triad, one of the 24 Tonnetz nodes.
struct TriadNode {
  PitchClass root;
  bool minor = false;

  int index() const { return root.value() * 2 + (minor ? 1 : 0); }
  static TriadNode from_index(int i) { return {PitchClass(i / 2), (i % 2) == 1}; }

  bool operator==(const TriadNode&) const = default;
};

// Neo-Riemannian transformations. Each changes exactly one note.
inline TriadNode parallel(TriadNode t) { return {t.root, !t.minor}; }
inline TriadNode relative(TriadNode t) {
  return t.minor ? TriadNode{t.root + 3, false} : TriadNode{t.root + 9, true};
}
inline TriadNode leading_tone(TriadNode t) {
  return t.minor ? TriadNode{t.root + 8, false} : TriadNode{t.root + 4, true};
}

// The PLR graph with unit edge costs and its all-pairs path lengths.
class TonnetzGraph {
 public:
  static constexpr int kNodes = 24;

  TonnetzGraph() {
    for (int i = 0; i < kNodes; ++i) {
      TriadNode t = TriadNode::from_index(i);
      neighbours_[i] = {parallel(t).index(), relative(t).index(), leading_tone(t).index()};
    }
    for (int s = 0; s < kNodes; ++s) bfs(s);
  }

  static const TonnetzGraph& instance() {
    static const TonnetzGraph graph;
    return graph;
  }

  const std::array<int, 3>& neighbours(int node) const { return neighbours_[node]; }
  int path_length(TriadNode a, TriadNode b) const { return dist_[a.index()][b.index()]; }

  int diameter() const {
    int d = 0;
    for (const auto& row : dist_) d = std::max(d, *std::max_element(row.begin(), row.end()));
    return d;
  }

 private:
  void bfs(int source) {
    auto& row = dist_[source];
    row.fill(-1);
    row[source] = 0;
    std::deque<int> queue{source};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : neighbours_[u]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }

  std::array<std::array<int, 3>, kNodes> neighbours_{};
  std::array<std::array<int, kNodes>, kNodes> dist_{};
};

// The A0 triad a class descends from, if any.
inline std::optional<TriadNode> triad_of(const ChordClass& cls) {
  ChordClass base = reduce(cls, AlphabetId::kA0);
  if (base.is_no_chord()) return std::nullopt;
  return TriadNode{*base.root(), *base.quality() == Quality::kMin};
}

namespace detail {

inline void check_same_alphabet(const ChordClass& a, const ChordClass& b) {
  if (a.alphabet() != b.alphabet()) throw AlphabetMismatch(a.alphabet(), b.alphabet());
}

inline bool is_a0_resident(const ChordClass& c) {
  auto q = c.quality();
  return q && (*q == Quality::kMaj || *q == Quality::kMin);
}

// D1 between two distinct classes that both have a triad.
inline double d1_triads(const ChordClass& a, TriadNode ta, const ChordClass& b, TriadNode tb,
                        const DistanceOptions& opt) {
  double path = TonnetzGraph::instance().path_length(ta, tb);
  int reduced = (is_a0_resident(a) ? 0 : 1) + (is_a0_resident(b) ? 0 : 1);
  if (!opt.surcharge_each_operand) reduced = std::min(reduced, 1);
  return path + opt.reduction_surcharge * reduced;
}

inline double d2_raw(const ChordClass& a, const ChordClass& b) {
  return std::sqrt(static_cast<double>((pitch_vector(a) ^ pitch_vector(b)).count()));
}

}  // namespace detail

// Largest D1 between two chords (N excluded) with a triad in `alphabet`.
inline double max_finite_d1(AlphabetId alphabet, const DistanceOptions& opt = {}) {
  if (opt.reduction_surcharge >= 0.0) {
    // Above A0 every triad has reduced descendants (maj7, min7), so the
    // farthest pair is two reduced chords on diametrically opposite triads.
    int charged = alphabet == AlphabetId::kA0 ? 0 : (opt.surcharge_each_operand ? 2 : 1);
    return TonnetzGraph::instance().diameter() + opt.reduction_surcharge * charged;
  }
  auto classes = enumerate_classes(alphabet);
  double best = 0.0;
  for (const auto& a : classes) {
    auto ta = triad_of(a);
    if (!ta) continue;
    for (const auto& b : classes) {
      if (a == b) continue;
      auto tb = triad_of(b);
      if (!tb) continue;
      best = std::max(best, detail::d1_triads(a, *ta, b, *tb, opt));
    }
  }
  return best;
}

// Largest D2 between two chords (N excluded) in `alphabet`.
inline double max_finite_d2(AlphabetId alphabet) {
  auto classes = enumerate_classes(alphabet);
  double best = 0.0;
  for (const auto& a : classes) {
    if (a.is_no_chord()) continue;
    for (const auto& b : classes) {
      if (!b.is_no_chord()) best = std::max(best, detail::d2_raw(a, b));
    }
  }
  return best;
}

inline double d0(const ChordClass& a, const ChordClass& b) {
  detail::check_same_alphabet(a, b);
  return a == b ? 0.0 : 1.0;
}

inline double d1(const ChordClass& a, const ChordClass& b, const DistanceOptions& opt = {}) {
  detail::check_same_alphabet(a, b);
  if (a == b) return 0.0;
  auto ta = triad_of(a);
  auto tb = triad_of(b);
  if (!ta || !tb) return max_finite_d1(a.alphabet(), opt);
  return detail::d1_triads(a, *ta, b, *tb, opt);
}

inline double d2(const ChordClass& a, const ChordClass& b, const DistanceOptions& opt = {}) {
  detail::check_same_alphabet(a, b);
  if (a == b) return 0.0;
  if (opt.d2_no_chord == NoChordPolicy::kMaxFinite && (a.is_no_chord() || b.is_no_chord())) {
    return max_finite_d2(a.alphabet());
  }
  return detail::d2_raw(a, b);
}

inline double distance(DistanceKind kind, const ChordClass& a, const ChordClass& b,
                       const DistanceOptions& opt = {}) {
  switch (kind) {
    case DistanceKind::kD0: return d0(a, b);
    case DistanceKind::kD1: return d1(a, b, opt);
    case DistanceKind::kD2: return d2(a, b, opt);
  }
  return 0.0;
}

// Square, symmetric, zero-diagonal matrix indexed by class index.
inline Matrix distance_matrix(DistanceKind kind, AlphabetId alphabet,
                              const DistanceOptions& opt = {}) {
  auto classes = enumerate_classes(alphabet);
  const std::size_t n = classes.size();
  Matrix m(n, n);
  // Only the max-finite fallbacks are expensive; hoist them.
  const double d1_far = kind == DistanceKind::kD1 ? max_finite_d1(alphabet, opt) : 0.0;
  const double d2_far = kind == DistanceKind::kD2 && opt.d2_no_chord == NoChordPolicy::kMaxFinite
                            ? max_finite_d2(alphabet)
                            : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = classes[i];
      const auto& b = classes[j];
      double v = 0.0;
      switch (kind) {
        case DistanceKind::kD0: v = 1.0; break;
        case DistanceKind::kD1: {
          auto ta = triad_of(a);
          auto tb = triad_of(b);
          v = (ta && tb) ? detail::d1_triads(a, *ta, b, *tb, opt) : d1_far;
          break;
        }
        case DistanceKind::kD2:
          v = (d2_far > 0.0 && (a.is_no_chord() || b.is_no_chord())) ? d2_far
                                                                      : detail::d2_raw(a, b);
          break;
      }
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

}  // namespace chordlab
