#pragma once

// `.lab` annotation tracks and duration-weighted chord recall.
//
// A chord `.lab` line is `start end label`, separated by spaces or tabs.
// A key `.lab` line is `start end [Key] tonic[:major|:minor]`, or
// `start end Silence|N` for a stretch without key.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chordlab/alphabets.hpp"
#include "chordlab/chord_syntax.hpp"

namespace chordlab {

class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedLine : public LabError {
 public:
  MalformedLine(std::size_t line, const std::string& what)
      : LabError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class OverlapError : public LabError {
 public:
  OverlapError(double prev_end, double start)
      : LabError("segment starting at " + std::to_string(start) +
                 " overlaps previous segment ending at " + std::to_string(prev_end)) {}
};

class EmptyReference : public std::invalid_argument {
 public:
  EmptyReference() : std::invalid_argument("reference track has no segments") {}
};

enum class Mode { kMajor, kMinor };

struct Key {
  PitchClass tonic;
  Mode mode = Mode::kMajor;

  bool operator==(const Key&) const = default;
};

inline std::string key_name(const Key& k) {
  return pitch_name(k.tonic) + (k.mode == Mode::kMajor ? ":major" : ":minor");
}

struct Segment {
  double start = 0.0;
  double end = 0.0;
  ChordLabel label;
};

struct KeySegment {
  double start = 0.0;
  double end = 0.0;
  Key key;
};

// Time-ordered, non-overlapping segments. Gaps are N (or no key).
struct AnnotationTrack {
  std::vector<Segment> segments;
  std::vector<KeySegment> keys;

  bool empty() const { return segments.empty(); }
  double end_time() const { return segments.empty() ? 0.0 : segments.back().end; }

  // Label sounding at time t; N in gaps and outside the track.
  ChordLabel label_at(double t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const Segment& s) { return v < s.start; });
    if (it == segments.begin()) return ChordLabel::no_chord();
    --it;
    return t < it->end ? it->label : ChordLabel::no_chord();
  }

  std::optional<Key> key_at(double t) const {
    auto it = std::upper_bound(keys.begin(), keys.end(), t,
                               [](double v, const KeySegment& s) { return v < s.start; });
    if (it == keys.begin()) return std::nullopt;
    --it;
    if (t < it->end) return it->key;
    return std::nullopt;
  }
};

enum class UnknownLabelPolicy {
  kError,     // unparsable labels raise MalformedLine
  kNoChord,   // unparsable labels become N
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_time(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Calls fn(line_number, start, end, fields after the times) for each
// non-blank, non-comment line.
template <typename Fn>
void for_each_lab_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() < 3) throw MalformedLine(line_no, "expected 'start end label'");
    auto start = parse_time(fields[0]);
    auto end = parse_time(fields[1]);
    if (!start || !end) throw MalformedLine(line_no, "invalid time value");
    if (*start < 0.0 || !(*start < *end)) {
      throw MalformedLine(line_no, "segment must satisfy 0 <= start < end");
    }
    fn(line_no, *start, *end, std::vector<std::string_view>(fields.begin() + 2, fields.end()));
  }
}

template <typename Seg>
void sort_and_check(std::vector<Seg>& segs) {
  std::stable_sort(segs.begin(), segs.end(),
                   [](const Seg& a, const Seg& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < segs.size(); ++i) {
    if (segs[i].start < segs[i - 1].end) throw OverlapError(segs[i - 1].end, segs[i].start);
  }
}

}  // namespace detail

inline AnnotationTrack parse_lab(std::string_view text,
                                 UnknownLabelPolicy policy = UnknownLabelPolicy::kError) {
  AnnotationTrack track;
  detail::for_each_lab_line(text, [&](std::size_t line, double start, double end,
                                      const std::vector<std::string_view>& rest) {
    if (rest.size() != 1) throw MalformedLine(line, "expected a single chord label");
    ChordLabel label;
    try {
      label = parse_chord(rest.front());
    } catch (const ChordError& e) {
      if (policy == UnknownLabelPolicy::kError) throw MalformedLine(line, e.what());
      label = ChordLabel::no_chord();
    }
    track.segments.push_back({start, end, std::move(label)});
  });
  detail::sort_and_check(track.segments);
  return track;
}

// Parses `tonic[:major|:minor|:maj|:min]`; nullopt for a malformed key.
inline std::optional<Key> parse_key(std::string_view text) {
  std::string_view tonic = text, mode;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    tonic = text.substr(0, colon);
    mode = text.substr(colon + 1);
  }
  ChordLabel root;
  try {
    root = parse_chord(tonic);
  } catch (const ChordError&) {
    return std::nullopt;
  }
  if (root.is_no_chord() || !root.extensions.empty() || root.bass) return std::nullopt;
  Key k{*root.root, Mode::kMajor};
  if (mode == "minor" || mode == "min") {
    k.mode = Mode::kMinor;
  } else if (!mode.empty() && mode != "major" && mode != "maj") {
    return std::nullopt;
  }
  return k;
}

// Key annotations; the result's chord segments are empty.
inline AnnotationTrack parse_key_lab(std::string_view text) {
  AnnotationTrack track;
  detail::for_each_lab_line(text, [&](std::size_t line, double start, double end,
                                      std::vector<std::string_view> rest) {
    if (rest.front() == "Key") rest.erase(rest.begin());
    if (rest.size() != 1) throw MalformedLine(line, "expected a single key");
    if (rest.front() == "Silence" || rest.front() == "N") return;
    auto key = parse_key(rest.front());
    if (!key) throw MalformedLine(line, "invalid key '" + std::string(rest.front()) + "'");
    track.keys.push_back({start, end, *key});
  });
  detail::sort_and_check(track.keys);
  return track;
}

inline std::string format_lab(const AnnotationTrack& track) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& s : track.segments) {
    out << s.start << '\t' << s.end << '\t' << format_chord(s.label) << '\n';
  }
  return out.str();
}

enum class EvalVocabulary { kMajMin, kSevenths, kTetrads };

inline constexpr AlphabetId vocabulary_alphabet(EvalVocabulary v) {
  switch (v) {
    case EvalVocabulary::kMajMin: return AlphabetId::kA0;
    case EvalVocabulary::kSevenths: return AlphabetId::kA1;
    case EvalVocabulary::kTetrads: return AlphabetId::kA2;
  }
  return AlphabetId::kA2;
}

inline constexpr std::string_view vocabulary_name(EvalVocabulary v) {
  switch (v) {
    case EvalVocabulary::kMajMin: return "majmin";
    case EvalVocabulary::kSevenths: return "sevenths";
    case EvalVocabulary::kTetrads: return "tetrads";
  }
  return "?";
}

inline std::optional<EvalVocabulary> vocabulary_from_name(std::string_view name) {
  for (auto v : {EvalVocabulary::kMajMin, EvalVocabulary::kSevenths, EvalVocabulary::kTetrads}) {
    if (vocabulary_name(v) == name) return v;
  }
  return std::nullopt;
}

namespace detail {

// Sorted boundaries of the tracks clipped to [lo, hi].
inline std::vector<double> breakpoints(double lo, double hi,
                                       std::initializer_list<const AnnotationTrack*> tracks) {
  std::vector<double> pts{lo, hi};
  for (const auto* t : tracks) {
    for (const auto& s : t->segments) {
      pts.push_back(std::clamp(s.start, lo, hi));
      pts.push_back(std::clamp(s.end, lo, hi));
    }
    for (const auto& s : t->keys) {
      pts.push_back(std::clamp(s.start, lo, hi));
      pts.push_back(std::clamp(s.end, lo, hi));
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

struct SongScore {
  std::string name;
  double correct = 0.0;    // seconds
  double evaluated = 0.0;  // seconds

  double recall() const { return evaluated > 0.0 ? correct / evaluated : 0.0; }
};

// Recall of `estimate` against `reference` over the reference span, both
// reduced to the vocabulary's alphabet. Gaps on either side are N.
inline SongScore score(const AnnotationTrack& reference, const AnnotationTrack& estimate,
                       EvalVocabulary vocab) {
  if (reference.empty()) throw EmptyReference();
  const AlphabetId alphabet = vocabulary_alphabet(vocab);
  const double lo = reference.segments.front().start;
  const double hi = reference.end_time();
  const auto pts = detail::breakpoints(lo, hi, {&reference, &estimate});
  SongScore s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double mid = 0.5 * (pts[i] + pts[i + 1]);
    const double len = pts[i + 1] - pts[i];
    s.evaluated += len;
    if (class_of(reference.label_at(mid), alphabet) == class_of(estimate.label_at(mid), alphabet)) {
      s.correct += len;
    }
  }
  return s;
}

// Default hop: 2048 samples at 44.1 kHz.
inline constexpr double kDefaultHopSeconds = 2048.0 / 44100.0;

// Class at each frame centre (k + 0.5) * hop for frames covering
// [0, duration); duration defaults to the track end.
inline std::vector<ChordClass> frame_sample(const AnnotationTrack& track, AlphabetId alphabet,
                                            double hop = kDefaultHopSeconds,
                                            std::optional<double> duration = std::nullopt) {
  if (!(hop > 0.0)) throw std::invalid_argument("hop must be > 0");
  const double total = duration.value_or(track.end_time());
  const auto frames = static_cast<std::size_t>(std::max(0.0, std::ceil(total / hop - 1e-9)));
  std::vector<ChordClass> out;
  out.reserve(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    out.push_back(class_of(track.label_at((static_cast<double>(k) + 0.5) * hop), alphabet));
  }
  return out;
}

struct ScoreReport {
  EvalVocabulary vocabulary = EvalVocabulary::kMajMin;
  std::vector<SongScore> songs;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : songs) t += s.evaluated;
    return t;
  }

  // Correct duration over evaluated duration, pooled across songs.
  double weighted_recall() const {
    double c = 0.0;
    for (const auto& s : songs) c += s.correct;
    const double t = total_duration();
    return t > 0.0 ? c / t : 0.0;
  }

  // Unweighted mean of per-song recall.
  double mean_song_recall() const {
    if (songs.empty()) return 0.0;
    double r = 0.0;
    for (const auto& s : songs) r += s.recall();
    return r / static_cast<double>(songs.size());
  }
};

}  // namespace chordlab
