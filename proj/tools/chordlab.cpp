// chordlab command-line front end.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chordlab/chordlab.hpp"

namespace fs = std::filesystem;
using namespace chordlab;

namespace {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;  // empty: command default
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_to(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json meta(const std::string& command, const Globals& g, Json config) {
  return {{"tool", "chordlab"},
          {"version", std::string(kVersion)},
          {"command", command},
          {"seed", g.seed},
          {"config", std::move(config)}};
}

// Metadata as leading comment lines of a CSV report.
std::string csv_meta(const Json& m) {
  std::string out = "# chordlab " + m["version"].get<std::string>() + " " +
                    m["command"].get<std::string>() + " seed=" + std::to_string(m["seed"].get<std::uint64_t>()) + "\n";
  out += "# config " + m["config"].dump() + "\n";
  return out;
}

AlphabetId alphabet_arg(const std::string& s) {
  auto a = alphabet_from_name(s);
  if (!a) throw UsageError("unknown alphabet '" + s + "' (A0, A1, A2)");
  return *a;
}

DistanceKind distance_arg(const std::string& s) {
  auto d = distance_from_name(s);
  if (!d) throw UsageError("unknown distance '" + s + "' (D0, D1, D2)");
  return *d;
}

std::string format_or(const Globals& g, const std::string& fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "json" && f != "csv") throw UsageError("--format must be json or csv");
  return f;
}

// Maps relative path without extension to file, for a .lab file or a
// directory searched recursively.
std::map<std::string, fs::path> discover(const fs::path& root) {
  std::map<std::string, fs::path> out;
  if (fs::is_regular_file(root)) {
    out[root.stem().string()] = root;
    return out;
  }
  if (!fs::is_directory(root)) throw DataError("no such file or directory: " + root.string());
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".lab") continue;
    auto rel = fs::relative(e.path(), root);
    rel.replace_extension();
    out[rel.generic_string()] = e.path();
  }
  return out;
}

// --- commands -----------------------------------------------------------------

int cmd_parse(const Globals& g, const std::string& label) {
  const auto c = parse_chord(label);
  if (format_or(g, "csv") == "csv") {
    write_to(g.out, format_chord(c) + "\n");
    return 0;
  }
  Json j = {{"input", label}, {"label", format_chord(c)}, {"no_chord", c.is_no_chord()}};
  if (!c.is_no_chord()) {
    j["root"] = pitch_name(*c.root);
    j["quality"] = std::string(quality_name(*c.quality));
    j["extensions"] = c.extensions;
    j["bass"] = c.bass ? Json(*c.bass) : Json(nullptr);
  }
  write_to(g.out, dump(j));
  return 0;
}

int cmd_reduce(const Globals& g, const std::string& label, const std::string& alphabet) {
  write_to(g.out, class_of(std::string_view(label), alphabet_arg(alphabet)).name() + "\n");
  return 0;
}

struct DistanceArgs {
  std::string kind;
  std::string a, b;
  std::string alphabet = "A2";
  bool matrix = false;
  double surcharge = 1.0;
  bool surcharge_once = false;
  std::string d2_no_chord = "vector";
};

DistanceOptions distance_options(const DistanceArgs& d) {
  DistanceOptions opt;
  opt.reduction_surcharge = d.surcharge;
  opt.surcharge_each_operand = !d.surcharge_once;
  if (d.d2_no_chord == "max") {
    opt.d2_no_chord = NoChordPolicy::kMaxFinite;
  } else if (d.d2_no_chord != "vector") {
    throw UsageError("--d2-no-chord must be vector or max");
  }
  return opt;
}

Json distance_config(const DistanceArgs& d) {
  return {{"distance", d.kind},
          {"alphabet", d.alphabet},
          {"surcharge", d.surcharge},
          {"surcharge_each_operand", !d.surcharge_once},
          {"d2_no_chord", d.d2_no_chord}};
}

int cmd_distance(const Globals& g, const DistanceArgs& d) {
  const auto kind = distance_arg(d.kind);
  const auto alphabet = alphabet_arg(d.alphabet);
  const auto opt = distance_options(d);
  if (d.matrix) {
    const auto m = distance_matrix(kind, alphabet, opt);
    const auto md = meta("distance", g, distance_config(d));
    if (format_or(g, "csv") == "csv") {
      write_to(g.out, csv_meta(md) + matrix_csv(m, alphabet));
    } else {
      Json j = matrix_json(m, alphabet);
      j["meta"] = md;
      write_to(g.out, dump(j));
    }
    return 0;
  }
  if (d.a.empty() || d.b.empty()) throw UsageError("distance needs two chords or --matrix");
  const double v = distance(kind, class_of(std::string_view(d.a), alphabet),
                            class_of(std::string_view(d.b), alphabet), opt);
  write_to(g.out, detail::format_double(v) + "\n");
  return 0;
}

struct SimArgs {
  DistanceArgs dist;
  double k = 1.0;
  bool renorm = false;
  std::string row;
};

int cmd_simmatrix(const Globals& g, const SimArgs& s) {
  const auto kind = distance_arg(s.dist.kind);
  const auto alphabet = alphabet_arg(s.dist.alphabet);
  const auto sim = build_similarity(distance_matrix(kind, alphabet, distance_options(s.dist)), s.k);
  Json config = distance_config(s.dist);
  config["K"] = s.k;
  config["renorm_targets"] = s.renorm;
  if (!s.row.empty()) config["row"] = s.row;
  const auto md = meta("simmatrix", g, config);

  if (!s.row.empty()) {
    const auto cls = class_of(std::string_view(s.row), alphabet);
    const auto t = soft_target(cls, sim, s.renorm);
    const auto classes = enumerate_classes(alphabet);
    if (format_or(g, "json") == "csv") {
      std::string out = csv_meta(md) + "chord,weight\n";
      for (std::size_t i = 0; i < classes.size(); ++i) {
        out += classes[i].name() + ',' + detail::format_double(t.weights[i]) + '\n';
      }
      write_to(g.out, out);
    } else {
      Json weights = Json::object();
      for (std::size_t i = 0; i < classes.size(); ++i) weights[classes[i].name()] = t.weights[i];
      write_to(g.out, dump({{"meta", md}, {"target", cls.name()}, {"weights", weights}}));
    }
    return 0;
  }
  if (format_or(g, "csv") == "csv") {
    write_to(g.out, csv_meta(md) + matrix_csv(sim.entries, alphabet));
  } else {
    Json j = matrix_json(sim.entries, alphabet);
    j["meta"] = md;
    write_to(g.out, dump(j));
  }
  return 0;
}

struct SynthArgs {
  std::string alphabet = "A0";
  int frames_per_class = 10;
  double noise = 0.0;
};

int cmd_synth(const Globals& g, const SynthArgs& s) {
  if (s.frames_per_class < 1) throw UsageError("--frames-per-class must be >= 1");
  if (s.noise < 0.0) throw UsageError("--noise must be >= 0");
  auto ds = synth_dataset(alphabet_arg(s.alphabet), s.frames_per_class, s.noise, g.seed);
  Json j = dataset_to_json(ds);
  j["meta"] = meta("synth", g,
                   {{"alphabet", s.alphabet}, {"frames_per_class", s.frames_per_class}, {"noise", s.noise}});
  write_to(g.out, j.dump() + "\n");
  return 0;
}

struct TrainArgs {
  std::string data;
  SynthArgs synth;
  std::string targets = "onehot";
  double k = 1.0;
  bool renorm = false;
  std::string model = "linear";
  std::vector<int> hidden = {64};
  TrainConfig config;
  std::string optimizer = "adam";
  std::string save_model;
  std::string history;
};

int cmd_train(const Globals& g, TrainArgs t) {
  Dataset ds;
  if (!t.data.empty()) {
    try {
      ds = dataset_from_json(Json::parse(read_file(t.data)));
    } catch (const Json::exception& e) {
      throw DataError(t.data + ": " + e.what());
    }
  } else {
    if (t.synth.frames_per_class < 1) throw UsageError("--frames-per-class must be >= 1");
    ds = synth_dataset(alphabet_arg(t.synth.alphabet), t.synth.frames_per_class, t.synth.noise, g.seed);
  }
  const AlphabetId alphabet = ds.alphabet;

  std::optional<SimilarityMatrix> sim;
  if (t.targets != "onehot") {
    sim = build_similarity(distance_matrix(distance_arg(t.targets), alphabet), t.k);
  }

  ModelSpec spec;
  if (t.model == "linear") {
    spec = ModelSpec::linear(alphabet);
    spec.input_height = ds.frame_height;
    spec.input_width = ds.frame_width;
  } else if (t.model == "dense") {
    spec = ModelSpec::dense(alphabet, t.hidden, ds.frame_height, ds.frame_width);
  } else if (t.model == "cnn") {
    spec = ModelSpec::convolutional(alphabet, ds.frame_height, ds.frame_width);
  } else {
    throw UsageError("--model must be linear, dense or cnn");
  }
  if (t.optimizer == "sgd") {
    t.config.optimizer = OptimizerKind::kSgd;
  } else if (t.optimizer != "adam") {
    throw UsageError("--optimizer must be adam or sgd");
  }
  t.config.seed = g.seed;
  t.config.renormalize_targets = t.renorm;
  try {
    t.config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto split = random_split(ds, 0.6, 0.2, g.seed);
  const auto result = train(Model::initialized(spec, g.seed), split.train, split.validation,
                            sim ? &*sim : nullptr, t.config);

  const auto targets_of = [&](const Dataset& part) { return make_targets(part, sim ? &*sim : nullptr, t.renorm); };
  const auto test_eval = evaluate(result.best, split.test, targets_of(split.test));

  Json config = {{"data", t.data.empty() ? Json("synthetic") : Json(t.data)},
                 {"alphabet", std::string(alphabet_name(alphabet))},
                 {"targets", t.targets},
                 {"K", t.k},
                 {"renorm_targets", t.renorm},
                 {"model", t.model},
                 {"hidden", t.hidden},
                 {"optimizer", t.optimizer},
                 {"learning_rate", t.config.learning_rate},
                 {"max_epochs", t.config.max_epochs},
                 {"plateau_patience", t.config.plateau_patience},
                 {"early_stop_patience", t.config.early_stop_patience},
                 {"batch_size", t.config.batch_size},
                 {"input_noise_std", t.config.input_noise_std},
                 {"dropout", t.config.dropout},
                 {"split", {0.6, 0.2, 0.2}}};
  if (t.data.empty()) {
    config["frames_per_class"] = t.synth.frames_per_class;
    config["noise"] = t.synth.noise;
  }
  const auto& best = result.history.at(static_cast<std::size_t>(result.best_epoch - 1));
  Json report = {{"meta", meta("train", g, config)},
                 {"frames", {{"train", split.train.size()},
                             {"validation", split.validation.size()},
                             {"test", split.test.size()}}},
                 {"epochs_run", result.history.size()},
                 {"early_stopped", result.early_stopped},
                 {"best_epoch", result.best_epoch},
                 {"train_accuracy", accuracy(result.best, split.train)},
                 {"validation_accuracy", best.val_accuracy},
                 {"test_accuracy", test_eval.accuracy},
                 {"test_loss", test_eval.loss}};
  if (!t.save_model.empty()) write_to(t.save_model, model_to_json(result.best).dump() + "\n");
  if (!t.history.empty()) write_to(t.history, history_csv(result.history));
  write_to(g.out, dump(report));
  return 0;
}

AnnotationTrack load_lab(const fs::path& p, UnknownLabelPolicy policy) {
  try {
    return parse_lab(read_file(p), policy);
  } catch (const LabError& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

struct EvalArgs {
  std::string ref, est;
  std::string vocab = "majmin";
  bool unknown_as_n = false;
};

int cmd_evaluate(const Globals& g, const EvalArgs& a) {
  std::vector<EvalVocabulary> vocabs;
  if (a.vocab == "all") {
    vocabs = {EvalVocabulary::kMajMin, EvalVocabulary::kSevenths, EvalVocabulary::kTetrads};
  } else if (auto v = vocabulary_from_name(a.vocab)) {
    vocabs = {*v};
  } else {
    throw UsageError("--vocab must be majmin, sevenths, tetrads or all");
  }
  const auto policy = a.unknown_as_n ? UnknownLabelPolicy::kNoChord : UnknownLabelPolicy::kError;
  const auto refs = discover(a.ref);
  const auto ests = discover(a.est);
  const bool single = fs::is_regular_file(a.ref) && fs::is_regular_file(a.est);

  std::vector<ScoreReport> reports;
  for (auto v : vocabs) reports.push_back({v, {}});
  std::vector<std::string> missing;
  for (const auto& [name, ref_path] : refs) {
    fs::path est_path;
    if (single) {
      est_path = ests.begin()->second;
    } else if (auto it = ests.find(name); it != ests.end()) {
      est_path = it->second;
    } else {
      missing.push_back(name);
      std::cerr << "warning: no estimate for " << name << ", skipped\n";
      continue;
    }
    const auto ref = load_lab(ref_path, policy);
    const auto est = load_lab(est_path, policy);
    if (ref.empty()) throw DataError(ref_path.string() + ": empty reference");
    for (auto& r : reports) {
      auto s = score(ref, est, r.vocabulary);
      s.name = name;
      r.songs.push_back(s);
    }
  }
  if (reports.front().songs.empty()) throw DataError("no reference/estimate pairs found");

  const auto md = meta("evaluate", g,
                       {{"ref", a.ref}, {"est", a.est}, {"vocab", a.vocab}, {"unknown_as_n", a.unknown_as_n}});
  if (format_or(g, "json") == "csv") {
    std::string out = csv_meta(md);
    for (const auto& r : reports) {
      if (vocabs.size() > 1) out += "# vocabulary " + std::string(vocabulary_name(r.vocabulary)) + "\n";
      out += score_report_csv(r);
    }
    write_to(g.out, out);
    return 0;
  }
  Json results = Json::array();
  for (const auto& r : reports) results.push_back(score_report_json(r));
  write_to(g.out, dump({{"meta", md}, {"skipped", missing}, {"results", results}}));
  return 0;
}

struct AnalyzeArgs {
  std::string ref, est, keys;
  std::string alphabet = "A2";
  bool count_frames = false;
  bool count_events = false;
  double hop = kDefaultHopSeconds;
  double threshold = 0.0;
  std::string pairs_csv;
  bool unknown_as_n = false;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  const auto alphabet = alphabet_arg(a.alphabet);
  if (a.count_frames && a.count_events) throw UsageError("--count-frames and --count-events are exclusive");
  const auto policy = a.unknown_as_n ? UnknownLabelPolicy::kNoChord : UnknownLabelPolicy::kError;
  const auto refs = discover(a.ref);
  const auto ests = discover(a.est);
  std::map<std::string, fs::path> keys;
  if (!a.keys.empty()) keys = discover(a.keys);
  const bool single = fs::is_regular_file(a.ref) && fs::is_regular_file(a.est);

  std::vector<ErrorPair> errors;
  std::vector<std::string> skipped;
  for (const auto& [name, ref_path] : refs) {
    fs::path est_path;
    if (single) {
      est_path = ests.begin()->second;
    } else if (auto it = ests.find(name); it != ests.end()) {
      est_path = it->second;
    } else {
      skipped.push_back(name);
      std::cerr << "warning: no estimate for " << name << ", skipped\n";
      continue;
    }
    AnnotationTrack key_track;
    const fs::path* key_path = nullptr;
    if (fs::is_regular_file(a.keys)) {
      key_path = &keys.begin()->second;
    } else if (auto it = keys.find(name); it != keys.end()) {
      key_path = &it->second;
    }
    if (key_path) {
      try {
        key_track = parse_key_lab(read_file(*key_path));
      } catch (const LabError& e) {
        throw DataError(key_path->string() + ": " + e.what());
      }
    }
    const auto ref = load_lab(ref_path, policy);
    if (ref.empty()) throw DataError(ref_path.string() + ": empty reference");
    auto song = align_errors(ref, load_lab(est_path, policy), key_track, alphabet);
    errors.insert(errors.end(), song.begin(), song.end());
  }

  AnalyzeOptions opt;
  opt.weighting = a.count_frames ? Weighting::kFrames : a.count_events ? Weighting::kEvents : Weighting::kDuration;
  opt.frame_hop = a.hop;
  opt.degree_pair_threshold = a.threshold;
  if (!(opt.frame_hop > 0.0)) throw UsageError("--hop must be > 0");

  Json config = {{"ref", a.ref},
                 {"est", a.est},
                 {"keys", a.keys},
                 {"alphabet", a.alphabet},
                 {"weighting", std::string(weighting_name(opt.weighting))},
                 {"frame_hop", opt.frame_hop},
                 {"degree_pair_threshold", opt.degree_pair_threshold},
                 {"minor_key_degrees", "natural minor"},
                 {"tonic_subs_2", "maj->min +4 semitones or min->maj +8 semitones"},
                 {"subs_dominant", "predicted dominant seventh a fifth above the target root"}};
  Json report = {{"meta", meta("analyze", g, config)}, {"skipped", skipped}};
  const Json body = error_report_json(analyze(errors, opt));
  for (const auto& [k, v] : body.items()) report[k] = v;
  if (!a.pairs_csv.empty()) write_to(a.pairs_csv, error_pairs_csv(errors));
  write_to(g.out, dump(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chordlab: chord vocabularies, distances, soft targets and error analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  std::string label, alphabet = "A2";
  auto* parse = app.add_subcommand("parse", "Parse and normalise a chord label");
  parse->add_option("label", label, "Chord label")->required();

  auto* reduce_cmd = app.add_subcommand("reduce", "Map a chord label into an alphabet");
  reduce_cmd->add_option("label", label, "Chord label")->required();
  reduce_cmd->add_option("--alphabet", alphabet, "A0, A1 or A2")->capture_default_str();

  DistanceArgs dist;
  auto add_distance_flags = [&](CLI::App* sub, DistanceArgs& d) {
    sub->add_option("--alphabet", d.alphabet, "A0, A1 or A2")->capture_default_str();
    sub->add_option("--surcharge", d.surcharge, "D1 cost per operand outside A0")->capture_default_str();
    sub->add_flag("--surcharge-once", d.surcharge_once, "Charge the D1 surcharge once per pair");
    sub->add_option("--d2-no-chord", d.d2_no_chord, "D2 treatment of N: vector or max")
        ->capture_default_str();
  };
  auto* distance_cmd = app.add_subcommand("distance", "Distance between two chords, or a full matrix");
  distance_cmd->add_option("kind", dist.kind, "D0, D1 or D2")->required();
  distance_cmd->add_option("a", dist.a, "First chord");
  distance_cmd->add_option("b", dist.b, "Second chord");
  distance_cmd->add_flag("--matrix", dist.matrix, "Print the whole distance matrix");
  add_distance_flags(distance_cmd, dist);

  SimArgs sim;
  sim.dist.kind = "D2";
  auto* sim_cmd = app.add_subcommand("simmatrix", "Normalised similarity matrix or one soft target");
  sim_cmd->add_option("--distance", sim.dist.kind, "D0, D1 or D2")->capture_default_str();
  sim_cmd->add_option("--K", sim.k, "Smoothing constant, > 0")->capture_default_str();
  sim_cmd->add_flag("--renorm-targets", sim.renorm, "Rescale soft targets to sum to one");
  sim_cmd->add_option("--row", sim.row, "Print only the soft target of this chord");
  add_distance_flags(sim_cmd, sim.dist);

  SynthArgs synth;
  auto add_synth_flags = [&](CLI::App* sub, SynthArgs& s) {
    sub->add_option("--alphabet", s.alphabet, "A0, A1 or A2")->capture_default_str();
    sub->add_option("--frames-per-class", s.frames_per_class, "Frames per class")->capture_default_str();
    sub->add_option("--noise", s.noise, "Gaussian noise std")->capture_default_str();
  };
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic chroma dataset as JSON");
  add_synth_flags(synth_cmd, synth);

  TrainArgs tr;
  tr.config.learning_rate = 0.01;
  tr.config.max_epochs = 200;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier with one-hot or soft targets");
  train_cmd->add_option("--data", tr.data, "Dataset JSON (default: synthesise one)");
  add_synth_flags(train_cmd, tr.synth);
  train_cmd->add_option("--targets", tr.targets, "onehot, D0, D1 or D2")->capture_default_str();
  train_cmd->add_option("--K", tr.k, "Smoothing constant for soft targets")->capture_default_str();
  train_cmd->add_flag("--renorm-targets", tr.renorm, "Rescale soft targets to sum to one");
  train_cmd->add_option("--model", tr.model, "linear, dense or cnn")->capture_default_str();
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths for --model dense");
  train_cmd->add_option("--optimizer", tr.optimizer, "adam or sgd")->capture_default_str();
  train_cmd->add_option("--lr", tr.config.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", tr.config.max_epochs, "Maximum epochs")->capture_default_str();
  train_cmd->add_option("--plateau-patience", tr.config.plateau_patience)->capture_default_str();
  train_cmd->add_option("--plateau-factor", tr.config.plateau_factor)->capture_default_str();
  train_cmd->add_option("--early-stop-patience", tr.config.early_stop_patience)->capture_default_str();
  train_cmd->add_option("--batch-size", tr.config.batch_size, "0 for full batch")->capture_default_str();
  train_cmd->add_option("--input-noise", tr.config.input_noise_std)->capture_default_str();
  train_cmd->add_option("--dropout", tr.config.dropout)->capture_default_str();
  train_cmd->add_option("--save-model", tr.save_model, "Write the best model as JSON");
  train_cmd->add_option("--history", tr.history, "Write per-epoch history as CSV");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Duration-weighted chord symbol recall");
  eval_cmd->add_option("--ref", ev.ref, "Reference .lab file or directory")->required();
  eval_cmd->add_option("--est", ev.est, "Estimate .lab file or directory")->required();
  eval_cmd->add_option("--vocab", ev.vocab, "majmin, sevenths, tetrads or all")->capture_default_str();
  eval_cmd->add_flag("--unknown-as-n", ev.unknown_as_n, "Read unparsable labels as N");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Classify estimation errors");
  analyze_cmd->add_option("--ref", an.ref, "Reference .lab file or directory")->required();
  analyze_cmd->add_option("--est", an.est, "Estimate .lab file or directory")->required();
  analyze_cmd->add_option("--keys", an.keys, "Key .lab file or directory");
  analyze_cmd->add_option("--alphabet", an.alphabet, "A0, A1 or A2")->capture_default_str();
  analyze_cmd->add_flag("--count-frames", an.count_frames, "Weight errors by frame count");
  analyze_cmd->add_flag("--count-events", an.count_events, "Weight each error pair once");
  analyze_cmd->add_option("--hop", an.hop, "Frame hop in seconds for --count-frames")->capture_default_str();
  analyze_cmd->add_option("--threshold", an.threshold, "Minimum fraction for extra degree pairs")
      ->capture_default_str();
  analyze_cmd->add_option("--pairs-csv", an.pairs_csv, "Write classified error pairs as CSV");
  analyze_cmd->add_flag("--unknown-as-n", an.unknown_as_n, "Read unparsable labels as N");

  // Global flags may also follow the subcommand.
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return cmd_parse(g, label);
    if (*reduce_cmd) return cmd_reduce(g, label, alphabet);
    if (*distance_cmd) return cmd_distance(g, dist);
    if (*sim_cmd) return cmd_simmatrix(g, sim);
    if (*synth_cmd) return cmd_synth(g, synth);
    if (*train_cmd) return cmd_train(g, tr);
    if (*eval_cmd) return cmd_evaluate(g, ev);
    if (*analyze_cmd) return cmd_analyze(g, an);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
