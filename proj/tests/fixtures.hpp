#pragma once

// Hand-built data shared by the unit tests and the acceptance suite.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "chordlab/analyzer.hpp"
#include "chordlab/evaluation.hpp"

namespace chordlab::fixture {

inline const Key kCMajor{PitchClass(0), Mode::kMajor};
inline const Key kAMinor{PitchClass(9), Mode::kMinor};

inline ErrorPair pair(std::string_view t, std::string_view p, std::optional<Key> key = kCMajor,
                      double duration = 1.0) {
  return {class_of(t, AlphabetId::kA2), class_of(p, AlphabetId::kA2), duration, key};
}

// Twenty hand-labelled pairs; expected rule sets and degrees in comments.
inline std::vector<ErrorPair> error_pairs(double duration = 1.0) {
  return {
      pair("C:maj7", "C:maj", kCMajor, duration),        //  1 incl_maj; I=I
      pair("C:min", "C:min7", kCMajor, duration),        //  2 incl_min; target non-diatonic
      pair("A:min", "C:maj", kCMajor, duration),         //  3 rel_M; I~vi
      pair("C:maj", "A:min", kCMajor, duration),         //  4 rel_m; I~vi
      pair("C:maj7", "E:min7", kCMajor, duration),       //  5 tonic_subs_2; I~iii
      pair("A:min", "F:maj", kCMajor, duration),         //  6 tonic_subs_2; IV~vi
      pair("C:maj", "C:min", kCMajor, duration),         //  7 M_to_m; prediction non-diatonic
      pair("A:min", "A:maj", kCMajor, duration),         //  8 m_to_M; prediction non-diatonic
      pair("G:7", "C#:7", kCMajor, duration),            //  9 tritone_subs; prediction non-diatonic
      pair("C:maj", "G:7", kCMajor, duration),           // 10 subs_dominant; I~V
      pair("B:dim7", "D:dim7", kCMajor, duration),       // 11 dim7_equiv; prediction non-diatonic
      pair("C:maj", "F:maj", kCMajor, duration),         // 12 -; I~IV
      pair("F:maj", "G:maj", kCMajor, duration),         // 13 -; IV~V
      pair("F:maj", "D:min", kCMajor, duration),         // 14 rel_m; IV~ii
      pair("E:min", "A:min", kAMinor, duration),         // 15 -; i~v
      pair("D:min7", "F:maj6", kCMajor, duration),       // 16 rel_M; IV~ii
      pair("E:min", "C:maj", kCMajor, duration),         // 17 tonic_subs_2; I~iii
      pair("C:maj", "N", kCMajor, duration),             // 18 -; prediction non-diatonic
      pair("N", "C:maj", kCMajor, duration),             // 19 -; target non-diatonic
      pair("C:maj7", "A:min7", std::nullopt, duration),  // 20 rel_m; no key
  };
}

// Expected fractions for error_pairs(), counted by hand from the comments.
struct ExpectedReport {
  std::map<Rule, double> rules;
  double explained;
  double non_diatonic_target;
  double non_diatonic_prediction;
  double degree_preserving;
  std::map<std::string, double> degree_pairs;
};

inline ExpectedReport expected_report() {
  return {{{Rule::kInclMaj, 1.0 / 20.0},
           {Rule::kInclMin, 1.0 / 20.0},
           {Rule::kRelMajor, 2.0 / 20.0},
           {Rule::kRelMinor, 3.0 / 20.0},
           {Rule::kTonicSubs2, 3.0 / 20.0},
           {Rule::kMinorToMajor, 1.0 / 20.0},
           {Rule::kMajorToMinor, 1.0 / 20.0},
           {Rule::kTritoneSubs, 1.0 / 20.0},
           {Rule::kSubsDominant, 1.0 / 20.0},
           {Rule::kDim7Equiv, 1.0 / 20.0}},
          15.0 / 20.0,
          2.0 / 19.0,
          5.0 / 17.0,
          1.0 / 17.0,
          {{"I~IV", 1.0 / 17.0},
           {"I~V", 1.0 / 17.0},
           {"IV~V", 1.0 / 17.0},
           {"I~vi", 2.0 / 17.0},
           {"IV~ii", 2.0 / 17.0},
           {"I~iii", 2.0 / 17.0},
           {"IV~vi", 1.0 / 17.0},
           {"i~v", 1.0 / 17.0}}};
}

inline bool matches(const ErrorReport& r, const ExpectedReport& e) {
  for (const auto& [rule, f] : e.rules) {
    if (r.fraction(rule) != f) return false;
  }
  return r.error_count == 20 && r.explained == e.explained &&
         r.non_diatonic_target == e.non_diatonic_target &&
         r.non_diatonic_prediction == e.non_diatonic_prediction &&
         r.degree_preserving == e.degree_preserving && r.degree_pairs == e.degree_pairs;
}

// Contiguous random track over [0, length) drawn from a mixed-quality pool.
inline AnnotationTrack random_track(std::mt19937& rng, double length) {
  static const std::vector<std::string> pool = {
      "C:maj", "C:maj7", "C:7", "C:maj6", "A:min", "A:min7", "A:minmaj7", "A:min6", "B:dim",
      "B:hdim7", "B:dim7", "E:aug", "D:sus4", "D:sus2", "N", "G:7", "G:maj"};
  std::uniform_real_distribution<double> len(0.1, 1.5);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  AnnotationTrack t;
  double at = 0.0;
  while (at < length) {
    const double end = std::min(length, at + len(rng));
    t.segments.push_back({at, end, parse_chord(pool[pick(rng)])});
    at = end;
  }
  return t;
}

}  // namespace chordlab::fixture
