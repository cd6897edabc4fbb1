#pragma once

// JSON and CSV forms of the library's data.
//
// Model bundle:
//   {"format": "chordlab-model", "version": 1, "alphabet": "A0",
//    "input": [h, w], "layers": [{"kind": "conv2d"|"dense", "size": n,
//    "kernel": [u, v]}, ...], "params": {"shape": [n], "values": [...]}}
// "layers" lists hidden layers only; the dense output layer is implied.
//
// Dataset bundle:
//   {"format": "chordlab-dataset", "version": 1, "alphabet": "A0",
//    "frame_shape": [h, w], "labels": [...], "frames": {"shape": [n, h*w],
//    "values": [...]}}

#include <charconv>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chordlab/alphabets.hpp"
#include "chordlab/analyzer.hpp"
#include "chordlab/evaluation.hpp"
#include "chordlab/learner.hpp"
#include "chordlab/matrix.hpp"

namespace chordlab {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline AlphabetId alphabet_field(const Json& j) {
  auto a = alphabet_from_name(j.at("alphabet").get<std::string>());
  if (!a) throw FormatError("unknown alphabet " + j.at("alphabet").dump());
  return *a;
}

inline void expect_format(const Json& j, const char* name) {
  if (j.value("format", "") != name || j.value("version", 0) != 1) {
    throw FormatError(std::string("not a ") + name + " v1 document");
  }
}

// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace detail

inline Json model_to_json(const Model& model) {
  Json layers = Json::array();
  for (const auto& h : model.spec().hidden) {
    layers.push_back({{"kind", h.kind == LayerKind::kConv2d ? "conv2d" : "dense"},
                      {"size", h.size},
                      {"kernel", {h.kernel_height, h.kernel_width}}});
  }
  const auto p = model.params();
  return {{"format", "chordlab-model"},
          {"version", 1},
          {"alphabet", alphabet_name(model.spec().alphabet)},
          {"input", {model.spec().input_height, model.spec().input_width}},
          {"layers", layers},
          {"params", {{"shape", {p.size()}}, {"values", std::vector<double>(p.begin(), p.end())}}}};
}

inline Model model_from_json(const Json& j) {
  detail::expect_format(j, "chordlab-model");
  ModelSpec spec;
  spec.alphabet = detail::alphabet_field(j);
  spec.input_height = j.at("input").at(0).get<int>();
  spec.input_width = j.at("input").at(1).get<int>();
  for (const auto& l : j.at("layers")) {
    const auto kind = l.at("kind").get<std::string>();
    if (kind != "conv2d" && kind != "dense") throw FormatError("unknown layer kind " + kind);
    spec.hidden.push_back({kind == "conv2d" ? LayerKind::kConv2d : LayerKind::kDense,
                           l.at("size").get<int>(), l.at("kernel").at(0).get<int>(),
                           l.at("kernel").at(1).get<int>()});
  }
  Model m(spec);
  const auto values = j.at("params").at("values").get<std::vector<double>>();
  if (values.size() != m.params().size()) {
    throw FormatError("model expects " + std::to_string(m.params().size()) + " parameters, got " +
                      std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), m.params().begin());
  return m;
}

inline Json dataset_to_json(const Dataset& ds) {
  std::vector<double> flat;
  const std::size_t width = static_cast<std::size_t>(ds.frame_height * ds.frame_width);
  flat.reserve(ds.size() * width);
  for (const auto& f : ds.frames) flat.insert(flat.end(), f.begin(), f.end());
  return {{"format", "chordlab-dataset"},
          {"version", 1},
          {"alphabet", alphabet_name(ds.alphabet)},
          {"frame_shape", {ds.frame_height, ds.frame_width}},
          {"labels", ds.labels},
          {"frames", {{"shape", {ds.size(), width}}, {"values", flat}}}};
}

inline Dataset dataset_from_json(const Json& j) {
  detail::expect_format(j, "chordlab-dataset");
  Dataset ds;
  ds.alphabet = detail::alphabet_field(j);
  ds.frame_height = j.at("frame_shape").at(0).get<int>();
  ds.frame_width = j.at("frame_shape").at(1).get<int>();
  ds.labels = j.at("labels").get<std::vector<int>>();
  const auto flat = j.at("frames").at("values").get<std::vector<double>>();
  const std::size_t width = static_cast<std::size_t>(ds.frame_height * ds.frame_width);
  if (width == 0 || flat.size() != ds.labels.size() * width) {
    throw FormatError("frame values do not match labels x frame_shape");
  }
  const int n = alphabet_size(ds.alphabet);
  for (int label : ds.labels) {
    if (label < 0 || label >= n) throw FormatError("label " + std::to_string(label) + " out of range");
  }
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    ds.frames.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i * width),
                           flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
  }
  return ds;
}

// epoch,train_loss,val_loss,val_acc
inline std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_loss,val_acc\n";
  for (const auto& e : history) {
    out += std::to_string(e.epoch) + ',' + detail::format_double(e.train_loss) + ',' +
           detail::format_double(e.val_loss) + ',' + detail::format_double(e.val_accuracy) + '\n';
  }
  return out;
}

// Class-labelled square matrix; header row and first column hold class names.
inline std::string matrix_csv(const Matrix& m, AlphabetId alphabet) {
  const auto classes = enumerate_classes(alphabet);
  if (m.rows() != classes.size() || m.cols() != classes.size()) {
    throw std::invalid_argument("matrix does not match alphabet size");
  }
  std::string out = "chord";
  for (const auto& c : classes) out += ',' + c.name();
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += classes[i].name();
    for (std::size_t j = 0; j < m.cols(); ++j) out += ',' + detail::format_double(m(i, j));
    out += '\n';
  }
  return out;
}

inline Json matrix_json(const Matrix& m, AlphabetId alphabet) {
  Json names = Json::array();
  for (const auto& c : enumerate_classes(alphabet)) names.push_back(c.name());
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return {{"alphabet", alphabet_name(alphabet)}, {"classes", names}, {"values", rows}};
}

inline Json score_report_json(const ScoreReport& r) {
  Json songs = Json::array();
  for (const auto& s : r.songs) {
    songs.push_back({{"song", s.name},
                     {"recall", s.recall()},
                     {"correct_seconds", s.correct},
                     {"evaluated_seconds", s.evaluated}});
  }
  return {{"vocabulary", vocabulary_name(r.vocabulary)},
          {"weighted_recall", r.weighted_recall()},
          {"mean_song_recall", r.mean_song_recall()},
          {"total_seconds", r.total_duration()},
          {"songs", songs}};
}

inline std::string score_report_csv(const ScoreReport& r) {
  std::string out = "song,recall,correct_seconds,evaluated_seconds\n";
  for (const auto& s : r.songs) {
    out += s.name + ',' + detail::format_double(s.recall()) + ',' +
           detail::format_double(s.correct) + ',' + detail::format_double(s.evaluated) + '\n';
  }
  out += "ALL," + detail::format_double(r.weighted_recall()) + ",," +
         detail::format_double(r.total_duration()) + '\n';
  return out;
}

inline std::string_view weighting_name(Weighting w) {
  switch (w) {
    case Weighting::kDuration: return "duration";
    case Weighting::kEvents: return "events";
    case Weighting::kFrames: return "frames";
  }
  return "?";
}

inline Json error_report_json(const ErrorReport& r) {
  Json rules = Json::object();
  for (Rule rule : kAllRules) rules[std::string(rule_name(rule))] = r.fraction(rule);
  Json pairs = Json::object();
  for (const auto& tag : headline_degree_pairs()) pairs[tag] = r.degree_pairs.at(tag);
  for (const auto& [tag, f] : r.degree_pairs) {
    if (!pairs.contains(tag)) pairs[tag] = f;
  }
  return {{"errors", r.error_count},
          {"total_weight", r.total_weight},
          {"substitutions", {{"total_explained", r.explained}, {"rules", rules}}},
          {"degrees",
           {{"keyed_weight", r.keyed_weight},
            {"non_diatonic_target", r.non_diatonic_target},
            {"diatonic_target_weight", r.diatonic_target_weight},
            {"non_diatonic_prediction", r.non_diatonic_prediction},
            {"degree_preserving", r.degree_preserving},
            {"pairs", pairs}}}};
}

// target,predicted,duration,key,rules,target_degree,predicted_degree
inline std::string error_pairs_csv(const std::vector<ErrorPair>& pairs) {
  std::string out = "target,predicted,duration,key,rules,target_degree,predicted_degree\n";
  for (const auto& p : pairs) {
    std::string rules;
    for (Rule r : match_substitutions(p)) {
      if (!rules.empty()) rules += ';';
      rules += rule_name(r);
    }
    std::string td, pd;
    if (p.key) {
      auto t = degree_of(p.target, p.key);
      auto q = degree_of(p.predicted, p.key);
      td = t ? degree_numeral(*t, p.key->mode) : "non-diatonic";
      pd = q ? degree_numeral(*q, p.key->mode) : "non-diatonic";
    }
    out += p.target.name() + ',' + p.predicted.name() + ',' + detail::format_double(p.duration) +
           ',' + (p.key ? key_name(*p.key) : std::string()) + ',' + rules + ',' + td + ',' + pd +
           '\n';
  }
  return out;
}

}  // namespace chordlab
