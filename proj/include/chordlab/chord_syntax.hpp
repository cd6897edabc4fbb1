#pragma once

// Harte chord labels: parsing, printing, stripping and transposition.
//
// Grammar accepted by parse_chord():
//
//   label  := "N" | root [ ":" quality [ "(" ext ("," ext)* ")" ] ] [ "/" interval ]
//   root   := [A-G] [#b]*
//   ext    := ["*"] interval
//   interval := [#b]* digit+
//
// A bare root ("C", "C/5") is a major chord. Extensions and bass intervals are
// kept verbatim; nothing downstream of the parser reads them.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chordlab {

class PitchClass {
 public:
  constexpr PitchClass() = default;
  constexpr explicit PitchClass(int semitones) : value_(wrap(semitones)) {}

  constexpr int value() const { return value_; }

  constexpr PitchClass operator+(int semitones) const { return PitchClass(value_ + semitones); }
  constexpr PitchClass operator-(int semitones) const { return PitchClass(value_ - semitones); }
  // Upward interval from `other` to this, in [0, 11].
  constexpr int operator-(PitchClass other) const { return wrap(value_ - other.value_); }

  constexpr bool operator==(const PitchClass&) const = default;
  constexpr auto operator<=>(const PitchClass&) const = default;

 private:
  static constexpr int wrap(int v) { return ((v % 12) + 12) % 12; }
  int value_ = 0;
};

inline constexpr std::array<std::string_view, 12> kSharpNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

inline std::string pitch_name(PitchClass pc) {
  return std::string(kSharpNames[static_cast<std::size_t>(pc.value())]);
}

// The 14 qualities of the largest alphabet, in alphabet order.
enum class Quality {
  kMaj,
  kMin,
  kDim,
  kAug,
  kMaj6,
  kMin6,
  kMaj7,
  kMinMaj7,
  kMin7,
  kDom7,
  kDim7,
  kHdim7,
  kSus2,
  kSus4,
};

inline constexpr std::size_t kQualityCount = 14;

inline constexpr std::array<Quality, kQualityCount> kAllQualities = {
    Quality::kMaj,  Quality::kMin,     Quality::kDim,  Quality::kAug,  Quality::kMaj6,
    Quality::kMin6, Quality::kMaj7,    Quality::kMinMaj7, Quality::kMin7, Quality::kDom7,
    Quality::kDim7, Quality::kHdim7,   Quality::kSus2, Quality::kSus4};

inline constexpr std::string_view quality_name(Quality q) {
  switch (q) {
    case Quality::kMaj: return "maj";
    case Quality::kMin: return "min";
    case Quality::kDim: return "dim";
    case Quality::kAug: return "aug";
    case Quality::kMaj6: return "maj6";
    case Quality::kMin6: return "min6";
    case Quality::kMaj7: return "maj7";
    case Quality::kMinMaj7: return "minmaj7";
    case Quality::kMin7: return "min7";
    case Quality::kDom7: return "7";
    case Quality::kDim7: return "dim7";
    case Quality::kHdim7: return "hdim7";
    case Quality::kSus2: return "sus2";
    case Quality::kSus4: return "sus4";
  }
  return "?";
}

inline std::optional<Quality> quality_from_name(std::string_view name) {
  for (Quality q : kAllQualities) {
    if (quality_name(q) == name) return q;
  }
  return std::nullopt;
}

class ChordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed label. position() is the byte offset of the first offending char.
class SyntaxError : public ChordError {
 public:
  SyntaxError(std::string text, std::size_t position, const std::string& what)
      : ChordError("syntax error in chord '" + text + "' at position " +
                   std::to_string(position) + ": " + what),
        text_(std::move(text)),
        position_(position) {}

  const std::string& text() const { return text_; }
  std::size_t position() const { return position_; }

 private:
  std::string text_;
  std::size_t position_;
};

// Well-formed label whose quality token is not one of the 14 known qualities.
class UnknownQuality : public ChordError {
 public:
  UnknownQuality(std::string text, std::string token, std::size_t position)
      : ChordError("unknown chord quality '" + token + "' in '" + text + "' at position " +
                   std::to_string(position)),
        token_(std::move(token)),
        position_(position) {}

  const std::string& token() const { return token_; }
  std::size_t position() const { return position_; }

 private:
  std::string token_;
  std::size_t position_;
};

// A parsed chord. The no-chord label has neither root nor quality.
struct ChordLabel {
  std::optional<PitchClass> root;
  std::optional<Quality> quality;
  std::vector<std::string> extensions;
  std::optional<std::string> bass;

  static ChordLabel no_chord() { return {}; }
  static ChordLabel chord(PitchClass r, Quality q) { return {r, q, {}, std::nullopt}; }

  bool is_no_chord() const { return !root.has_value(); }

  bool operator==(const ChordLabel&) const = default;
};

namespace detail {

inline std::optional<int> natural_pitch(char c) {
  switch (c) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: return std::nullopt;
  }
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

class ChordParser {
 public:
  explicit ChordParser(std::string_view text) : text_(text) {}

  ChordLabel parse() {
    if (text_.empty()) fail(0, "empty label");
    if (text_ == "N") return ChordLabel::no_chord();

    ChordLabel label;
    label.root = parse_root();
    label.quality = Quality::kMaj;

    if (peek() == ':') {
      ++pos_;
      label.quality = parse_quality();
      if (peek() == '(') label.extensions = parse_extensions();
    }
    if (peek() == '/') {
      ++pos_;
      label.bass = parse_interval(false);
    }
    if (pos_ != text_.size()) fail(pos_, "unexpected character");
    return label;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    throw SyntaxError(std::string(text_), at, what);
  }

  PitchClass parse_root() {
    auto natural = natural_pitch(peek());
    if (!natural) fail(pos_, "expected root note A-G or N");
    int value = *natural;
    ++pos_;
    while (peek() == '#' || peek() == 'b') {
      value += peek() == '#' ? 1 : -1;
      ++pos_;
    }
    return PitchClass(value);
  }

  Quality parse_quality() {
    std::size_t start = pos_;
    while (is_alnum(peek())) ++pos_;
    if (pos_ == start) fail(pos_, "expected quality after ':'");
    std::string token(text_.substr(start, pos_ - start));
    auto q = quality_from_name(token);
    char next = peek();
    if (next != '\0' && next != '(' && next != '/') fail(pos_, "unexpected character in quality");
    if (!q) throw UnknownQuality(std::string(text_), token, start);
    return *q;
  }

  std::string parse_interval(bool allow_omit) {
    std::size_t start = pos_;
    if (allow_omit && peek() == '*') ++pos_;
    while (peek() == '#' || peek() == 'b') ++pos_;
    std::size_t digits = pos_;
    while (is_digit(peek())) ++pos_;
    if (pos_ == digits) fail(pos_, "expected interval degree");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_extensions() {
    ++pos_;  // '('
    std::vector<std::string> out;
    out.push_back(parse_interval(true));
    while (peek() == ',') {
      ++pos_;
      out.push_back(parse_interval(true));
    }
    if (peek() != ')') fail(pos_, "expected ',' or ')'");
    ++pos_;
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Throws SyntaxError or UnknownQuality.
inline ChordLabel parse_chord(std::string_view text) { return detail::ChordParser(text).parse(); }

inline ChordLabel strip_to_core(const ChordLabel& label) {
  ChordLabel out = label;
  out.extensions.clear();
  out.bass.reset();
  return out;
}

inline std::string format_chord(const ChordLabel& label) {
  if (label.is_no_chord()) return "N";
  std::string out = pitch_name(*label.root);
  out += ':';
  out += quality_name(label.quality.value_or(Quality::kMaj));
  if (!label.extensions.empty()) {
    out += '(';
    for (std::size_t i = 0; i < label.extensions.size(); ++i) {
      if (i) out += ',';
      out += label.extensions[i];
    }
    out += ')';
  }
  if (label.bass) {
    out += '/';
    out += *label.bass;
  }
  return out;
}

inline ChordLabel transpose(const ChordLabel& label, int semitones) {
  ChordLabel out = label;
  if (out.root) out.root = *out.root + semitones;
  return out;
}

}  // namespace chordlab
