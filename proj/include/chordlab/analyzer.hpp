#pragma once

// Qualitative error analysis of chord estimates.
//
// Each (target, predicted) mismatch is tested against a set of substitution
// rules and, when a key is known, placed on the harmonic degrees of that key.
// Rule fractions are computed independently (one error may satisfy several
// rules); the explained total counts each error at most once.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chordlab/alphabets.hpp"
#include "chordlab/distances.hpp"
#include "chordlab/evaluation.hpp"

namespace chordlab {

enum class Rule {
  kInclMaj,
  kInclMin,
  kRelMajor,
  kRelMinor,
  kTonicSubs2,
  kMinorToMajor,
  kMajorToMinor,
  kTritoneSubs,
  kSubsDominant,
  kDim7Equiv,
};

inline constexpr std::size_t kRuleCount = 10;

inline constexpr std::array<Rule, kRuleCount> kAllRules = {
    Rule::kInclMaj,      Rule::kInclMin,      Rule::kRelMajor,    Rule::kRelMinor,
    Rule::kTonicSubs2,   Rule::kMinorToMajor, Rule::kMajorToMinor, Rule::kTritoneSubs,
    Rule::kSubsDominant, Rule::kDim7Equiv};

inline constexpr std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::kInclMaj: return "incl_maj";
    case Rule::kInclMin: return "incl_min";
    case Rule::kRelMajor: return "rel_M";
    case Rule::kRelMinor: return "rel_m";
    case Rule::kTonicSubs2: return "tonic_subs_2";
    case Rule::kMinorToMajor: return "m_to_M";
    case Rule::kMajorToMinor: return "M_to_m";
    case Rule::kTritoneSubs: return "tritone_subs";
    case Rule::kSubsDominant: return "subs_dominant";
    case Rule::kDim7Equiv: return "dim7_equiv";
  }
  return "?";
}

struct ErrorPair {
  ChordClass target;
  ChordClass predicted;
  double duration = 0.0;
  std::optional<Key> key;
};

namespace detail {

enum class Triad { kNone, kMajor, kMinor, kDiminished };

// Triad a class extends, with dim kept apart from N.
inline Triad triad_family(const ChordClass& c) {
  if (c.is_no_chord()) return Triad::kNone;
  auto q = reduce_quality(*c.quality(), AlphabetId::kA1);
  if (!q) return Triad::kNone;
  switch (*q) {
    case Quality::kMaj:
    case Quality::kMaj7:
    case Quality::kDom7: return Triad::kMajor;
    case Quality::kMin:
    case Quality::kMin7: return Triad::kMinor;
    case Quality::kDim: return Triad::kDiminished;
    default: return Triad::kNone;
  }
}

inline bool is_dominant(const ChordClass& c) { return c.quality() == Quality::kDom7; }

inline bool nested(PitchVector a, PitchVector b) { return (a & b) == a || (a & b) == b; }

}  // namespace detail

// Rules satisfied by the pair, in enum order. Pairs involving N match none.
inline std::vector<Rule> match_substitutions(const ErrorPair& pair) {
  std::vector<Rule> out;
  const auto& t = pair.target;
  const auto& p = pair.predicted;
  if (t.is_no_chord() || p.is_no_chord() || t == p) return out;

  const int up = *p.root() - *t.root();
  const auto t0 = detail::triad_family(t);
  const auto p0 = detail::triad_family(p);
  const bool t_maj = t0 == detail::Triad::kMajor, t_min = t0 == detail::Triad::kMinor;
  const bool p_maj = p0 == detail::Triad::kMajor, p_min = p0 == detail::Triad::kMinor;

  if (up == 0 && t0 == p0 && detail::nested(pitch_vector(t), pitch_vector(p))) {
    if (t_maj) out.push_back(Rule::kInclMaj);
    if (t_min) out.push_back(Rule::kInclMin);
  }
  if (t_min && p_maj && up == 3) out.push_back(Rule::kRelMajor);
  if (t_maj && p_min && up == 9) out.push_back(Rule::kRelMinor);
  if ((t_maj && p_min && up == 4) || (t_min && p_maj && up == 8)) out.push_back(Rule::kTonicSubs2);
  if (up == 0 && t_min && p_maj) out.push_back(Rule::kMinorToMajor);
  if (up == 0 && t_maj && p_min) out.push_back(Rule::kMajorToMinor);
  if (detail::is_dominant(t) && detail::is_dominant(p) && up == 6) {
    out.push_back(Rule::kTritoneSubs);
  }
  // Secondary dominant: the prediction is V7 of the target.
  if (detail::is_dominant(p) && up == 7) out.push_back(Rule::kSubsDominant);
  if (t.quality() == Quality::kDim7 && p.quality() == Quality::kDim7 && up % 3 == 0) {
    out.push_back(Rule::kDim7Equiv);
  }
  return out;
}

class MissingKey : public std::invalid_argument {
 public:
  MissingKey() : std::invalid_argument("degree analysis needs a key") {}
};

namespace detail {

struct DiatonicDegree {
  int semitones;
  Triad triad;
  std::string_view numeral;
};

inline constexpr std::array<DiatonicDegree, 7> kMajorDegrees = {{
    {0, Triad::kMajor, "I"},
    {2, Triad::kMinor, "ii"},
    {4, Triad::kMinor, "iii"},
    {5, Triad::kMajor, "IV"},
    {7, Triad::kMajor, "V"},
    {9, Triad::kMinor, "vi"},
    {11, Triad::kDiminished, "vii°"},
}};

// Natural minor.
inline constexpr std::array<DiatonicDegree, 7> kMinorDegrees = {{
    {0, Triad::kMinor, "i"},
    {2, Triad::kDiminished, "ii°"},
    {3, Triad::kMajor, "III"},
    {5, Triad::kMinor, "iv"},
    {7, Triad::kMinor, "v"},
    {8, Triad::kMajor, "VI"},
    {10, Triad::kMajor, "VII"},
}};

inline const std::array<DiatonicDegree, 7>& degrees_of(Mode m) {
  return m == Mode::kMajor ? kMajorDegrees : kMinorDegrees;
}

// Order of degrees inside a pair tag: tonic, subdominant, dominant, then
// their relatives (vi, ii, iii) and vii.
inline constexpr std::array<int, 7> kTagRank = {0, 4, 5, 1, 2, 3, 6};

}  // namespace detail

// Scale step 0..6 of the chord in `key`, or nullopt when it is not diatonic.
inline std::optional<int> degree_of(const ChordClass& chord, const std::optional<Key>& key) {
  if (!key) throw MissingKey();
  const auto family = detail::triad_family(chord);
  if (family == detail::Triad::kNone) return std::nullopt;
  const int offset = *chord.root() - key->tonic;
  const auto& table = detail::degrees_of(key->mode);
  for (int step = 0; step < 7; ++step) {
    const auto& d = table[static_cast<std::size_t>(step)];
    if (d.semitones == offset) {
      if (d.triad == family) return step;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::string degree_numeral(int step, Mode mode) {
  return std::string(detail::degrees_of(mode).at(static_cast<std::size_t>(step)).numeral);
}

// Unordered pair tag such as "I~vi" or "IV~ii".
inline std::string degree_pair_tag(int a, int b, Mode mode) {
  if (detail::kTagRank[static_cast<std::size_t>(b)] < detail::kTagRank[static_cast<std::size_t>(a)]) {
    std::swap(a, b);
  }
  return degree_numeral(a, mode) + "~" + degree_numeral(b, mode);
}

inline const std::array<std::string, 6>& headline_degree_pairs() {
  static const std::array<std::string, 6> tags = {"I~IV", "I~V", "IV~V", "I~vi", "IV~ii", "I~iii"};
  return tags;
}

enum class Weighting {
  kDuration,  // seconds
  kEvents,    // one per error pair
  kFrames,    // round(duration / hop)
};

struct AnalyzeOptions {
  Weighting weighting = Weighting::kDuration;
  double frame_hop = kDefaultHopSeconds;
  // Degree pairs other than the headline six are listed only at or above
  // this fraction of diatonic-target errors.
  double degree_pair_threshold = 0.0;
};

struct ErrorReport {
  std::size_t error_count = 0;
  double total_weight = 0.0;
  std::array<double, kRuleCount> rule_fraction{};
  double explained = 0.0;                  // Tot.
  double keyed_weight = 0.0;               // errors with a key
  double non_diatonic_target = 0.0;        // of keyed errors
  double diatonic_target_weight = 0.0;
  double non_diatonic_prediction = 0.0;    // of diatonic-target errors
  double degree_preserving = 0.0;          // of diatonic-target errors
  std::map<std::string, double> degree_pairs;  // of diatonic-target errors

  double fraction(Rule r) const { return rule_fraction[static_cast<std::size_t>(r)]; }
};

inline double pair_weight(const ErrorPair& p, const AnalyzeOptions& opt) {
  switch (opt.weighting) {
    case Weighting::kDuration: return p.duration;
    case Weighting::kEvents: return 1.0;
    case Weighting::kFrames: return std::round(p.duration / opt.frame_hop);
  }
  return p.duration;
}

inline ErrorReport analyze(const std::vector<ErrorPair>& errors, const AnalyzeOptions& opt = {}) {
  ErrorReport r;
  r.error_count = errors.size();
  std::array<double, kRuleCount> rule_weight{};
  double explained = 0.0, non_diatonic_target = 0.0, non_diatonic_pred = 0.0, preserving = 0.0;
  std::map<std::string, double> pair_weight_by_tag;

  for (const auto& e : errors) {
    const double w = pair_weight(e, opt);
    r.total_weight += w;
    const auto rules = match_substitutions(e);
    for (Rule rule : rules) rule_weight[static_cast<std::size_t>(rule)] += w;
    if (!rules.empty()) explained += w;

    if (!e.key) continue;
    r.keyed_weight += w;
    const auto t = degree_of(e.target, e.key);
    if (!t) {
      non_diatonic_target += w;
      continue;
    }
    r.diatonic_target_weight += w;
    const auto p = degree_of(e.predicted, e.key);
    if (!p) {
      non_diatonic_pred += w;
    } else if (*p == *t) {
      preserving += w;
    } else {
      pair_weight_by_tag[degree_pair_tag(*t, *p, e.key->mode)] += w;
    }
  }

  auto frac = [](double part, double whole) { return whole > 0.0 ? part / whole : 0.0; };
  for (std::size_t i = 0; i < kRuleCount; ++i) r.rule_fraction[i] = frac(rule_weight[i], r.total_weight);
  r.explained = frac(explained, r.total_weight);
  r.non_diatonic_target = frac(non_diatonic_target, r.keyed_weight);
  r.non_diatonic_prediction = frac(non_diatonic_pred, r.diatonic_target_weight);
  r.degree_preserving = frac(preserving, r.diatonic_target_weight);
  for (const auto& tag : headline_degree_pairs()) r.degree_pairs[tag] = 0.0;
  for (const auto& [tag, w] : pair_weight_by_tag) {
    const double f = frac(w, r.diatonic_target_weight);
    if (r.degree_pairs.count(tag) || f >= opt.degree_pair_threshold) r.degree_pairs[tag] = f;
  }
  return r;
}

// Mismatching stretches of reference vs estimate in `alphabet`, split at key
// changes and merged where target, prediction and key stay the same.
inline std::vector<ErrorPair> align_errors(const AnnotationTrack& reference,
                                           const AnnotationTrack& estimate,
                                           const AnnotationTrack& keys, AlphabetId alphabet) {
  if (reference.empty()) throw EmptyReference();
  const double lo = reference.segments.front().start;
  const double hi = reference.end_time();
  const auto pts = detail::breakpoints(lo, hi, {&reference, &estimate, &keys});
  std::vector<ErrorPair> out;
  double last_end = lo;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const auto t = class_of(reference.label_at(mid), alphabet);
    const auto p = class_of(estimate.label_at(mid), alphabet);
    if (t == p) continue;
    const auto key = keys.key_at(mid);
    const double len = pts[i + 1] - pts[i];
    if (!out.empty() && last_end == pts[i] && out.back().target == t &&
        out.back().predicted == p && out.back().key == key) {
      out.back().duration += len;
    } else {
      out.push_back({t, p, len, key});
    }
    last_end = pts[i + 1];
  }
  return out;
}

}  // namespace chordlab
