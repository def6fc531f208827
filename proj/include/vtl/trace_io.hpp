#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vtl/errors.hpp"
#include "vtl/parser.hpp"
#include "vtl/trace.hpp"

namespace vtl {

using json = nlohmann::json;

namespace detail {

inline json load_json_file(const std::string& path, const char* subsystem) {
  std::ifstream in(path);
  if (!in) throw Error(subsystem, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(subsystem, "invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text, const char* subsystem) {
  std::ofstream out(path);
  if (!out) throw Error(subsystem, "cannot write '" + path + "'");
  out << text;
}

template <typename T>
T require_field(const json& j, const char* field, const char* subsystem, const std::string& where) {
  if (!j.contains(field)) throw Error(subsystem, "missing field '" + std::string(field) + "' in " + where);
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw Error(subsystem, "field '" + std::string(field) + "' has the wrong type in " + where);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frame traces
//
// {"video_id": str, "fps": number, "propositions": [str],
//  "frames": [{"index": int, "confidences": {str: number}}]}

inline FrameTrace trace_from_json(const json& j, const std::string& where = "trace") {
  FrameTrace tr;
  tr.video_id = detail::require_field<std::string>(j, "video_id", "trace-io", where);
  tr.fps = j.value("fps", 1.0);
  if (!(tr.fps > 0)) throw Error("trace-io", "fps must be positive in " + where);
  tr.props = detail::require_field<std::vector<std::string>>(j, "propositions", "trace-io", where);
  if (!j.contains("frames") || !j.at("frames").is_array())
    throw Error("trace-io", "missing field 'frames' in " + where);
  const auto& frames = j.at("frames");
  if (frames.empty()) throw Error("trace-io", "empty frame list in " + where);
  tr.frames.reserve(frames.size());
  long expected = 0;
  for (const auto& fj : frames) {
    long index = detail::require_field<long>(fj, "index", "trace-io", where);
    if (index != expected)
      throw Error("trace-io", "non-contiguous frame index " + std::to_string(index) + " in " + where);
    if (!fj.contains("confidences") || !fj.at("confidences").is_object())
      throw Error("trace-io", "missing field 'confidences' at frame " + std::to_string(index));
    const auto& cj = fj.at("confidences");
    std::vector<double> row(tr.props.size());
    for (std::size_t i = 0; i < tr.props.size(); ++i) {
      if (!cj.contains(tr.props[i]))
        throw Error("trace-io",
                    "missing proposition " + tr.props[i] + " at frame " + std::to_string(index));
      double c = cj.at(tr.props[i]).get<double>();
      if (!(c >= 0.0 && c <= 1.0))
        throw Error("trace-io", "confidence " + std::to_string(c) + " for proposition " +
                                    tr.props[i] + " at frame " + std::to_string(index) +
                                    " outside [0,1]");
      row[i] = c;
    }
    for (auto it = cj.begin(); it != cj.end(); ++it)
      if (tr.prop_index(it.key()) < 0)
        throw Error("trace-io", "undeclared proposition " + it.key() + " at frame " +
                                    std::to_string(index));
    tr.frames.push_back(std::move(row));
    ++expected;
  }
  return tr;
}

inline json trace_to_json(const FrameTrace& tr) {
  json j;
  j["video_id"] = tr.video_id;
  j["fps"] = tr.fps;
  j["propositions"] = tr.props;
  json frames = json::array();
  for (std::size_t t = 0; t < tr.length(); ++t) {
    json cj;
    for (std::size_t i = 0; i < tr.props.size(); ++i) cj[tr.props[i]] = tr.frames[t][i];
    frames.push_back({{"index", t}, {"confidences", cj}});
  }
  j["frames"] = std::move(frames);
  return j;
}

inline FrameTrace load_trace(const std::string& path) {
  return trace_from_json(detail::load_json_file(path, "trace-io"), "'" + path + "'");
}

inline void save_trace(const FrameTrace& tr, const std::string& path) {
  detail::write_text_file(path, trace_to_json(tr).dump(2) + "\n", "trace-io");
}

// ---------------------------------------------------------------------------
// Annotations
//
// {"video_id": str, "query": str, "spec": str, "spans": [[int,int]],
//  "invocations": [{"frame": int, "tool": str, "args": {str: str}}]}

inline Annotation annotation_from_json(const json& j, const std::string& where = "annotation") {
  Annotation ann;
  ann.video_id = detail::require_field<std::string>(j, "video_id", "trace-io", where);
  ann.query = j.value("query", "");
  ann.spec_text = detail::require_field<std::string>(j, "spec", "trace-io", where);
  parse_formula(ann.spec_text);  // reject unparseable specs at load
  for (const auto& sj : j.value("spans", json::array())) {
    if (!sj.is_array() || sj.size() != 2)
      throw Error("trace-io", "span must be a [start,end] pair in " + where);
    Span s{sj[0].get<long>(), sj[1].get<long>()};
    if (s.start < 0) throw Error("trace-io", "negative span start in " + where);
    if (s.end < s.start) throw Error("trace-io", "span end before start in " + where);
    ann.spans.push_back(s);
  }
  std::sort(ann.spans.begin(), ann.spans.end(),
            [](const Span& a, const Span& b) { return a.start != b.start ? a.start < b.start : a.end < b.end; });
  for (const auto& ij : j.value("invocations", json::array())) {
    GtInvocation inv;
    inv.frame = detail::require_field<long>(ij, "frame", "trace-io", where);
    inv.tool = detail::require_field<std::string>(ij, "tool", "trace-io", where);
    if (inv.tool.empty()) throw Error("trace-io", "empty tool id in " + where);
    if (inv.frame < 0) throw Error("trace-io", "negative invocation frame in " + where);
    const json args = ij.value("args", json::object());
    for (const auto& [k, v] : args.items()) inv.args[k] = v.get<std::string>();
    ann.invocations.push_back(std::move(inv));
  }
  return ann;
}

inline json annotation_to_json(const Annotation& ann) {
  json j;
  j["video_id"] = ann.video_id;
  j["query"] = ann.query;
  j["spec"] = ann.spec_text;
  json spans = json::array();
  for (const auto& s : ann.spans) spans.push_back({s.start, s.end});
  j["spans"] = std::move(spans);
  json invs = json::array();
  for (const auto& inv : ann.invocations) {
    json args = json::object();
    for (const auto& [k, v] : inv.args) args[k] = v;
    invs.push_back({{"frame", inv.frame}, {"tool", inv.tool}, {"args", std::move(args)}});
  }
  j["invocations"] = std::move(invs);
  return j;
}

inline Annotation load_annotation(const std::string& path) {
  return annotation_from_json(detail::load_json_file(path, "trace-io"), "'" + path + "'");
}

inline void save_annotation(const Annotation& ann, const std::string& path) {
  detail::write_text_file(path, annotation_to_json(ann).dump(2) + "\n", "trace-io");
}

/// Check annotation spans and invocation frames against a trace length.
inline void validate_annotation(const Annotation& ann, long num_frames) {
  for (const auto& s : ann.spans)
    if (s.end >= num_frames)
      throw Error("trace-io", "span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                                  "] out of range for " + std::to_string(num_frames) + " frames");
  for (const auto& inv : ann.invocations)
    if (inv.frame >= num_frames)
      throw Error("trace-io", "invocation frame " + std::to_string(inv.frame) +
                                  " out of range for " + std::to_string(num_frames) + " frames");
}

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationMethod {
  enum class Kind { identity, threshold, temperature } kind = Kind::identity;
  double value = 0.0;  // threshold tau in [0,1], or temperature > 0

  static CalibrationMethod identity() { return {}; }
  static CalibrationMethod threshold(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error("trace-io", "threshold must lie in [0,1]");
    return {Kind::threshold, tau};
  }
  static CalibrationMethod temperature(double t) {
    if (!(t > 0.0)) throw Error("trace-io", "temperature must be positive");
    return {Kind::temperature, t};
  }

  /// Parse "identity", "threshold:0.5", or "temperature:2.0".
  static CalibrationMethod parse(const std::string& text) {
    if (text == "identity") return identity();
    auto colon = text.find(':');
    if (colon != std::string::npos) {
      std::string name = text.substr(0, colon);
      double v = 0;
      try {
        v = std::stod(text.substr(colon + 1));
      } catch (...) {
        throw UsageError("bad calibration value in '" + text + "'");
      }
      if (name == "threshold") return threshold(v);
      if (name == "temperature") return temperature(v);
    }
    throw UsageError("unknown calibration '" + text + "' (identity | threshold:T | temperature:T)");
  }
};

inline double apply_calibration(double c, const CalibrationMethod& m) {
  switch (m.kind) {
    case CalibrationMethod::Kind::identity:
      return c;
    case CalibrationMethod::Kind::threshold:
      return c >= m.value ? 1.0 : 0.0;  // ties go to 1.0
    case CalibrationMethod::Kind::temperature: {
      if (c <= 0.0) return 0.0;  // fixed points of the logit map
      if (c >= 1.0) return 1.0;
      double z = std::log(c / (1.0 - c)) / m.value;
      return 1.0 / (1.0 + std::exp(-z));
    }
  }
  return c;
}

inline FrameTrace calibrate(const FrameTrace& tr, const CalibrationMethod& m) {
  FrameTrace out = tr;
  for (auto& row : out.frames)
    for (auto& c : row) c = apply_calibration(c, m);
  return out;
}

// ---------------------------------------------------------------------------
// Scenario scripts and synthesis
//
// {"video_id": str, "fps": number, "num_frames": int, "propositions": [str],
//  "truth": [{"proposition": str, "start": int, "end": int}],
//  "noise": {"true_mean": number, "false_mean": number, "concentration": number},
//  "seed": int, "target": str, "query": str, "spec": str,
//  "invocations": [{"frame": int, "tool": str, "args": {str: str}}]}

struct TruthInterval {
  std::string prop;
  long start = 0;
  long end = 0;
};

struct ScenarioScript {
  std::string video_id;
  double fps = 1.0;
  long num_frames = 0;
  std::vector<std::string> props;
  std::vector<TruthInterval> truth;
  double true_mean = 0.9;
  double false_mean = 0.1;
  double concentration = 20.0;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string target;  // proposition whose truth intervals become the gt spans
  std::string query;
  std::string spec_text;
  std::vector<GtInvocation> invocations;

  bool noise_free() const { return true_mean == 1.0 && false_mean == 0.0; }
};

inline ScenarioScript scenario_from_json(const json& j, const std::string& where = "scenario") {
  ScenarioScript s;
  s.video_id = detail::require_field<std::string>(j, "video_id", "trace-io", where);
  s.fps = j.value("fps", 1.0);
  s.num_frames = detail::require_field<long>(j, "num_frames", "trace-io", where);
  if (s.num_frames < 1) throw Error("trace-io", "num_frames must be at least 1 in " + where);
  s.props = detail::require_field<std::vector<std::string>>(j, "propositions", "trace-io", where);
  if (s.props.empty()) throw Error("trace-io", "empty proposition list in " + where);
  for (const auto& tj : j.value("truth", json::array())) {
    TruthInterval iv;
    iv.prop = detail::require_field<std::string>(tj, "proposition", "trace-io", where);
    iv.start = detail::require_field<long>(tj, "start", "trace-io", where);
    iv.end = detail::require_field<long>(tj, "end", "trace-io", where);
    if (std::find(s.props.begin(), s.props.end(), iv.prop) == s.props.end())
      throw Error("trace-io", "truth interval names undeclared proposition '" + iv.prop + "'");
    if (iv.start < 0 || iv.end < iv.start || iv.end >= s.num_frames)
      throw Error("trace-io", "truth interval [" + std::to_string(iv.start) + "," +
                                  std::to_string(iv.end) + "] outside [0," +
                                  std::to_string(s.num_frames - 1) + "] for '" + iv.prop + "'");
    s.truth.push_back(std::move(iv));
  }
  if (j.contains("noise")) {
    const auto& nj = j.at("noise");
    s.true_mean = nj.value("true_mean", 0.9);
    s.false_mean = nj.value("false_mean", 0.1);
    s.concentration = nj.value("concentration", 20.0);
  }
  const bool degenerate = s.true_mean == 1.0 && s.false_mean == 0.0;
  if (!degenerate && !(0.0 < s.false_mean && s.false_mean < s.true_mean && s.true_mean < 1.0))
    throw Error("trace-io", "noise means must satisfy 0 < false_mean < true_mean < 1 "
                            "(or exactly 0 and 1 for noise-free mode)");
  if (!(s.concentration > 0.0)) throw Error("trace-io", "concentration must be positive");
  if (j.contains("seed")) {
    s.seed = j.at("seed").get<std::uint64_t>();
    s.has_seed = true;
  }
  s.target = j.value("target", "");
  if (!s.target.empty() && std::find(s.props.begin(), s.props.end(), s.target) == s.props.end())
    throw Error("trace-io", "target names undeclared proposition '" + s.target + "'");
  s.query = j.value("query", "");
  s.spec_text = j.value("spec", "");
  for (const auto& ij : j.value("invocations", json::array())) {
    GtInvocation inv;
    inv.frame = detail::require_field<long>(ij, "frame", "trace-io", where);
    inv.tool = detail::require_field<std::string>(ij, "tool", "trace-io", where);
    const json args = ij.value("args", json::object());
    for (const auto& [k, v] : args.items()) inv.args[k] = v.get<std::string>();
    s.invocations.push_back(std::move(inv));
  }
  return s;
}

inline ScenarioScript load_scenario(const std::string& path) {
  return scenario_from_json(detail::load_json_file(path, "trace-io"), "'" + path + "'");
}

namespace detail {

// Beta(mean, k) via two gamma draws; alpha = mean*k, beta = (1-mean)*k.
inline double sample_beta(std::mt19937_64& rng, double mean, double k) {
  std::gamma_distribution<double> ga(mean * k, 1.0);
  std::gamma_distribution<double> gb((1.0 - mean) * k, 1.0);
  double x = ga(rng);
  double y = gb(rng);
  double v = x / (x + y);
  // keep samples inside the open interval even after rounding
  return std::clamp(v, 1e-12, 1.0 - 1e-12);
}

}  // namespace detail

/// Deterministically synthesize a confidence trace and its annotation from a
/// scenario script. Frames where a proposition is inside one of its truth
/// intervals draw from Beta(true_mean, k), elsewhere Beta(false_mean, k);
/// noise-free mode (means exactly 1 and 0) emits exact 1.0/0.0.
inline std::pair<FrameTrace, Annotation> synthesize_trace(const ScenarioScript& s) {
  FrameTrace tr;
  tr.video_id = s.video_id;
  tr.fps = s.fps;
  tr.props = s.props;

  std::mt19937_64 rng(s.seed);
  const bool exact = s.noise_free();
  tr.frames.assign(s.num_frames, std::vector<double>(s.props.size(), 0.0));
  for (long t = 0; t < s.num_frames; ++t) {
    for (std::size_t i = 0; i < s.props.size(); ++i) {
      bool truth = false;
      for (const auto& iv : s.truth)
        if (iv.prop == s.props[i] && t >= iv.start && t <= iv.end) {
          truth = true;
          break;
        }
      double mean = truth ? s.true_mean : s.false_mean;
      tr.frames[t][i] = exact ? (truth ? 1.0 : 0.0) : detail::sample_beta(rng, mean, s.concentration);
    }
  }

  Annotation ann;
  ann.video_id = s.video_id;
  ann.query = s.query;
  ann.spec_text = s.spec_text;
  if (!s.target.empty()) {
    std::vector<Span> spans;
    for (const auto& iv : s.truth)
      if (iv.prop == s.target) spans.push_back({iv.start, iv.end});
    ann.spans = merge_spans(std::move(spans));
  }
  ann.invocations = s.invocations;
  return {std::move(tr), std::move(ann)};
}

// ---------------------------------------------------------------------------
// Streaming line protocol: one frame object per line, as in the trace file.

inline std::pair<long, FrameConfidences> parse_frame_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("trace-io", std::string("invalid frame line: ") + e.what());
  }
  long index = detail::require_field<long>(j, "index", "trace-io", "frame line");
  if (!j.contains("confidences") || !j.at("confidences").is_object())
    throw Error("trace-io", "missing field 'confidences' in frame line");
  FrameConfidences fc;
  for (const auto& [k, v] : j.at("confidences").items()) {
    double c = v.get<double>();
    if (!(c >= 0.0 && c <= 1.0))
      throw Error("trace-io", "confidence " + std::to_string(c) + " for proposition " + k +
                                  " at frame " + std::to_string(index) + " outside [0,1]");
    fc[k] = c;
  }
  return {index, std::move(fc)};
}

inline std::string frame_line(long index, const FrameConfidences& fc) {
  json cj = json::object();
  for (const auto& [k, v] : fc) cj[k] = v;
  json j{{"index", index}, {"confidences", std::move(cj)}};
  return j.dump();
}

}  // namespace vtl
