#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vtl/errors.hpp"

namespace vtl {

/// Per-frame confidences for one frame, keyed by proposition name.
using FrameConfidences = std::map<std::string, double>;

/// A boolean view of a video: one assignment bitmask per frame. Bit i of a
/// mask is proposition props[i].
struct BooleanTrace {
  std::vector<std::string> props;
  std::vector<std::uint32_t> frames;

  std::size_t length() const { return frames.size(); }

  int prop_index(const std::string& name) const {
    auto it = std::find(props.begin(), props.end(), name);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  }

  bool holds(std::size_t frame, int prop) const { return (frames[frame] >> prop) & 1u; }

  /// Build from per-frame sets of true propositions over an explicit universe.
  static BooleanTrace from_sets(std::vector<std::string> universe,
                                const std::vector<std::set<std::string>>& sets) {
    BooleanTrace tr;
    tr.props = std::move(universe);
    tr.frames.reserve(sets.size());
    for (const auto& s : sets) {
      std::uint32_t mask = 0;
      for (const auto& name : s) {
        int idx = tr.prop_index(name);
        if (idx < 0) throw Error("tl-core", "proposition '" + name + "' outside the trace universe");
        mask |= 1u << idx;
      }
      tr.frames.push_back(mask);
    }
    return tr;
  }
};

/// A probabilistic video after perception: per-frame confidence in [0,1]
/// for every proposition of the universe. frames[t][i] aligns with props[i].
struct FrameTrace {
  std::string video_id;
  double fps = 1.0;
  std::vector<std::string> props;
  std::vector<std::vector<double>> frames;

  std::size_t length() const { return frames.size(); }

  int prop_index(const std::string& name) const {
    auto it = std::find(props.begin(), props.end(), name);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  }

  /// Copy of frames [start, end] (inclusive).
  FrameTrace slice(std::size_t start, std::size_t end) const {
    FrameTrace out;
    out.video_id = video_id;
    out.fps = fps;
    out.props = props;
    out.frames.assign(frames.begin() + start, frames.begin() + end + 1);
    return out;
  }

  FrameConfidences frame_confidences(std::size_t t) const {
    FrameConfidences fc;
    for (std::size_t i = 0; i < props.size(); ++i) fc[props[i]] = frames[t][i];
    return fc;
  }
};

/// Inclusive frame interval.
struct Span {
  long start = 0;
  long end = 0;

  long length() const { return end - start + 1; }
  friend bool operator==(const Span& a, const Span& b) { return a.start == b.start && a.end == b.end; }
};

/// Merge overlapping or adjacent spans into disjoint sorted spans.
inline std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start != b.start ? a.start < b.start : a.end < b.end; });
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end + 1)
      out.back().end = std::max(out.back().end, s.end);
    else
      out.push_back(s);
  }
  return out;
}

/// One ground-truth tool invocation of an annotation.
struct GtInvocation {
  long frame = 0;
  std::string tool;
  std::map<std::string, std::string> args;
};

/// Ground truth for one video: the query, its specification, the satisfying
/// spans, and the expected tool invocations.
struct Annotation {
  std::string video_id;
  std::string query;
  std::string spec_text;
  std::vector<Span> spans;
  std::vector<GtInvocation> invocations;
};

}  // namespace vtl
