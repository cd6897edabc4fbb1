#pragma once

// Chord alphabets A0 (25 classes), A1 (73) and A2 (169).
//
// Every alphabet is {N} plus 12 roots times a quality list. Class 0 is N;
// class 1 + root * |qualities| + quality_position is a chord.
//
// Quality ancestry (also shipped as data/quality_hierarchy.csv):
//
//   A2 quality  A1 parent  A0 parent
//   maj         maj        maj
//   min         min        min
//   dim         dim        N
//   aug         N          N
//   maj6        maj        maj
//   min6        min        min
//   maj7        maj7       maj
//   minmaj7     min        min
//   min7        min7       min
//   7           7          maj
//   dim7        dim        N
//   hdim7       dim        N
//   sus2        N          N
//   sus4        N          N
//
// Ancestry keeps the third: sus chords have none and aug has no perfect
// fifth, so they fall to N.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chordlab/chord_syntax.hpp"

namespace chordlab {

enum class AlphabetId { kA0, kA1, kA2 };

inline constexpr std::array<AlphabetId, 3> kAllAlphabets = {AlphabetId::kA0, AlphabetId::kA1,
                                                            AlphabetId::kA2};

inline constexpr std::string_view alphabet_name(AlphabetId a) {
  switch (a) {
    case AlphabetId::kA0: return "A0";
    case AlphabetId::kA1: return "A1";
    case AlphabetId::kA2: return "A2";
  }
  return "?";
}

inline std::optional<AlphabetId> alphabet_from_name(std::string_view name) {
  for (AlphabetId a : kAllAlphabets) {
    if (alphabet_name(a) == name) return a;
  }
  return std::nullopt;
}

namespace detail {

inline constexpr std::array<Quality, 2> kA0Qualities = {Quality::kMaj, Quality::kMin};
inline constexpr std::array<Quality, 6> kA1Qualities = {Quality::kMaj,  Quality::kMin,
                                                        Quality::kDim,  Quality::kMaj7,
                                                        Quality::kMin7, Quality::kDom7};

}  // namespace detail

inline std::span<const Quality> alphabet_qualities(AlphabetId a) {
  switch (a) {
    case AlphabetId::kA0: return detail::kA0Qualities;
    case AlphabetId::kA1: return detail::kA1Qualities;
    case AlphabetId::kA2: return kAllQualities;
  }
  return {};
}

inline int alphabet_size(AlphabetId a) {
  return 1 + 12 * static_cast<int>(alphabet_qualities(a).size());
}

// Parent of an A2 quality in A1 (nullopt = N).
inline constexpr std::optional<Quality> parent_in_a1(Quality q) {
  switch (q) {
    case Quality::kMaj:
    case Quality::kMaj6: return Quality::kMaj;
    case Quality::kMin:
    case Quality::kMin6:
    case Quality::kMinMaj7: return Quality::kMin;
    case Quality::kDim:
    case Quality::kDim7:
    case Quality::kHdim7: return Quality::kDim;
    case Quality::kMaj7: return Quality::kMaj7;
    case Quality::kMin7: return Quality::kMin7;
    case Quality::kDom7: return Quality::kDom7;
    case Quality::kAug:
    case Quality::kSus2:
    case Quality::kSus4: return std::nullopt;
  }
  return std::nullopt;
}

// Parent of an A1 quality in A0. Defined for A1 qualities only.
inline constexpr std::optional<Quality> parent_in_a0_from_a1(Quality q) {
  switch (q) {
    case Quality::kMaj:
    case Quality::kMaj7:
    case Quality::kDom7: return Quality::kMaj;
    case Quality::kMin:
    case Quality::kMin7: return Quality::kMin;
    default: return std::nullopt;
  }
}

inline bool in_alphabet(Quality q, AlphabetId a) {
  auto qs = alphabet_qualities(a);
  return std::find(qs.begin(), qs.end(), q) != qs.end();
}

// Image of any A2 quality in `target` (nullopt = N). Lower alphabets are
// reached through A1, so reduction commutes down the chain.
inline std::optional<Quality> reduce_quality(Quality q, AlphabetId target) {
  if (target == AlphabetId::kA2) return q;
  auto a1 = in_alphabet(q, AlphabetId::kA1) ? std::optional<Quality>(q) : parent_in_a1(q);
  if (target == AlphabetId::kA1 || !a1) return a1;
  return parent_in_a0_from_a1(*a1);
}

class AlphabetMismatch : public std::invalid_argument {
 public:
  AlphabetMismatch(AlphabetId a, AlphabetId b)
      : std::invalid_argument("chord classes from different alphabets: " +
                              std::string(alphabet_name(a)) + " vs " +
                              std::string(alphabet_name(b))) {}
};

class IndexOutOfAlphabet : public std::out_of_range {
 public:
  IndexOutOfAlphabet(int index, AlphabetId a)
      : std::out_of_range("class index " + std::to_string(index) + " outside alphabet " +
                          std::string(alphabet_name(a))) {}
};

// A class of one alphabet. Equality is by alphabet and index.
class ChordClass {
 public:
  ChordClass(AlphabetId alphabet, int index) : alphabet_(alphabet), index_(index) {
    if (index < 0 || index >= alphabet_size(alphabet)) throw IndexOutOfAlphabet(index, alphabet);
  }

  static ChordClass no_chord(AlphabetId alphabet) { return ChordClass(alphabet, 0); }

  // Throws std::invalid_argument if `q` is not in the alphabet.
  static ChordClass of(AlphabetId alphabet, PitchClass root, Quality q) {
    auto qs = alphabet_qualities(alphabet);
    auto it = std::find(qs.begin(), qs.end(), q);
    if (it == qs.end()) {
      throw std::invalid_argument("quality " + std::string(quality_name(q)) + " not in " +
                                  std::string(alphabet_name(alphabet)));
    }
    int pos = static_cast<int>(it - qs.begin());
    return ChordClass(alphabet, 1 + root.value() * static_cast<int>(qs.size()) + pos);
  }

  AlphabetId alphabet() const { return alphabet_; }
  int index() const { return index_; }
  bool is_no_chord() const { return index_ == 0; }

  std::optional<PitchClass> root() const {
    if (is_no_chord()) return std::nullopt;
    return PitchClass((index_ - 1) / stride());
  }

  std::optional<Quality> quality() const {
    if (is_no_chord()) return std::nullopt;
    return alphabet_qualities(alphabet_)[static_cast<std::size_t>((index_ - 1) % stride())];
  }

  ChordLabel label() const {
    if (is_no_chord()) return ChordLabel::no_chord();
    return ChordLabel::chord(*root(), *quality());
  }

  std::string name() const { return format_chord(label()); }

  bool operator==(const ChordClass&) const = default;

 private:
  int stride() const { return static_cast<int>(alphabet_qualities(alphabet_).size()); }

  AlphabetId alphabet_;
  int index_;
};

// Maps a (stripped) label into `target`. Root is preserved; qualities without
// an ancestor in `target` go to N.
inline ChordClass reduce(const ChordLabel& label, AlphabetId target) {
  if (label.is_no_chord()) return ChordClass::no_chord(target);
  auto q = reduce_quality(label.quality.value_or(Quality::kMaj), target);
  if (!q) return ChordClass::no_chord(target);
  return ChordClass::of(target, *label.root, *q);
}

inline ChordClass reduce(const ChordClass& cls, AlphabetId target) {
  return reduce(cls.label(), target);
}

inline std::vector<ChordClass> enumerate_classes(AlphabetId target) {
  std::vector<ChordClass> out;
  const int n = alphabet_size(target);
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.emplace_back(target, i);
  return out;
}

inline ChordClass class_of(const ChordLabel& label, AlphabetId target) {
  return reduce(strip_to_core(label), target);
}

inline ChordClass class_of(std::string_view text, AlphabetId target) {
  return class_of(parse_chord(text), target);
}

inline ChordClass transpose(const ChordClass& cls, int semitones) {
  if (cls.is_no_chord()) return cls;
  return ChordClass::of(cls.alphabet(), *cls.root() + semitones, *cls.quality());
}

// quality,parent_A1,parent_A0 with "N" for no parent.
inline std::string quality_hierarchy_csv() {
  std::string out = "quality,parent_A1,parent_A0\n";
  auto name = [](std::optional<Quality> q) {
    return q ? std::string(quality_name(*q)) : std::string("N");
  };
  for (Quality q : kAllQualities) {
    out += std::string(quality_name(q)) + ',' + name(reduce_quality(q, AlphabetId::kA1)) + ',' +
           name(reduce_quality(q, AlphabetId::kA0)) + '\n';
  }
  return out;
}

}  // namespace chordlab
