#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vtl/automaton.hpp"
#include "vtl/errors.hpp"
#include "vtl/evaluate.hpp"
#include "vtl/rewrite.hpp"
#include "vtl/trace.hpp"

namespace vtl {

/// Probability mass per automaton state; the carrier of the forward pass.
struct StateDistribution {
  std::vector<double> mass;

  double total() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
};

/// Probability of each of the 2^n assignments under independent per-frame
/// confidences; conf[i] is the confidence of proposition i. The result sums
/// to 1 up to rounding.
inline std::vector<double> frame_distribution(const std::vector<double>& conf) {
  const std::size_t n = conf.size();
  std::vector<double> out(std::size_t{1} << n, 1.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= ((a >> i) & 1u) ? conf[i] : 1.0 - conf[i];
    out[a] = p;
  }
  return out;
}

namespace detail {

/// Confidences of the automaton's propositions at frame t, in automaton
/// order. Propositions of the trace that the automaton does not read are
/// marginalized out (exact under the independence model); a proposition the
/// automaton needs but the trace lacks is an error.
inline std::vector<int> trace_projection(const Dfa& d, const FrameTrace& tr) {
  std::vector<int> idx(d.props.size());
  for (std::size_t i = 0; i < d.props.size(); ++i) {
    int j = tr.prop_index(d.props[i]);
    if (j < 0)
      throw Error("prob-verify",
                  "universe mismatch: trace is missing proposition '" + d.props[i] + "'");
    idx[i] = j;
  }
  return idx;
}

}  // namespace detail

/// Advance the forward distribution by one frame of confidences (given in
/// automaton proposition order).
inline StateDistribution forward_step(const Dfa& d, const StateDistribution& dist,
                                      const std::vector<double>& conf) {
  std::vector<double> assign_prob = frame_distribution(conf);
  StateDistribution out;
  out.mass.assign(d.num_states(), 0.0);
  for (std::size_t q = 0; q < d.num_states(); ++q) {
    double m = dist.mass[q];
    if (m == 0.0) continue;
    const auto& row = d.next[q];
    for (std::size_t a = 0; a < assign_prob.size(); ++a) out.mass[row[a]] += m * assign_prob[a];
  }
  return out;
}

inline double accepting_mass(const Dfa& d, const StateDistribution& dist) {
  double p = 0.0;
  for (std::size_t q = 0; q < d.num_states(); ++q)
    if (d.accepting[q]) p += dist.mass[q];
  return p;
}

/// Probability that a random boolean trace drawn from the per-frame
/// independent confidences satisfies the compiled specification. Exact under
/// the independence model; clamped to [0,1] on output.
inline double satisfaction_probability(const Dfa& d, const FrameTrace& tr) {
  if (tr.length() == 0) throw Error("prob-verify", "empty trace");
  auto idx = detail::trace_projection(d, tr);
  StateDistribution dist;
  dist.mass.assign(d.num_states(), 0.0);
  dist.mass[0] = 1.0;
  std::vector<double> conf(d.props.size());
  for (std::size_t t = 0; t < tr.length(); ++t) {
    for (std::size_t i = 0; i < idx.size(); ++i) conf[i] = tr.frames[t][idx[i]];
    dist = forward_step(d, dist, conf);
  }
  return std::clamp(accepting_mass(d, dist), 0.0, 1.0);
}

constexpr int kBruteForceMaxProps = 4;
constexpr int kBruteForceMaxFrames = 8;

/// Independent oracle: enumerate every boolean trace over the formula's
/// propositions, weight each by its product of confidences, and sum the
/// weights of traces the direct evaluator accepts. Test-grade sizes only.
inline double brute_force_probability(const Formula& f, const FrameTrace& tr) {
  if (tr.length() == 0) throw Error("prob-verify", "empty trace");
  auto props = atoms_of(f);
  const std::size_t T = tr.length();
  if (props.size() > kBruteForceMaxProps || T > static_cast<std::size_t>(kBruteForceMaxFrames))
    throw Error("prob-verify", "size guard exceeded: brute force limited to " +
                                   std::to_string(kBruteForceMaxProps) + " propositions and " +
                                   std::to_string(kBruteForceMaxFrames) + " frames");
  Formula g = expand_bounds(f);

  // Per-frame assignment probabilities over the formula's propositions.
  std::vector<std::vector<double>> per_frame;
  per_frame.reserve(T);
  std::vector<double> conf(props.size());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < props.size(); ++i) {
      int j = tr.prop_index(props[i]);
      if (j < 0)
        throw Error("prob-verify", "universe mismatch: trace is missing proposition '" + props[i] + "'");
      conf[i] = tr.frames[t][j];
    }
    per_frame.push_back(frame_distribution(conf));
  }

  const std::uint64_t n_assignments = std::uint64_t{1} << props.size();
  BooleanTrace w;
  w.props = props;
  w.frames.assign(T, 0);

  double total = 0.0;
  std::vector<std::uint32_t> pick(T, 0);
  while (true) {
    double weight = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      w.frames[t] = pick[t];
      weight *= per_frame[t][pick[t]];
    }
    if (weight > 0.0 && evaluate_trace(g, w, 0)) total += weight;

    std::size_t t = 0;
    while (t < T) {
      if (++pick[t] < n_assignments) break;
      pick[t] = 0;
      ++t;
    }
    if (t == T) break;
  }
  return total;
}

/// Machine-readable satisfaction-probability result for one trace.
struct ScoreResult {
  std::string video_id;
  std::string spec_text;
  double probability = 0.0;
  std::size_t frames = 0;
  std::vector<std::string> propositions;
};

/// Whole-trace satisfaction probability of a specification, packaged with
/// the context needed to report it.
inline ScoreResult score_trace(const Formula& f, const std::string& spec_text, const FrameTrace& tr,
                               const CompileOptions& opts = {}) {
  Dfa d = compile_dfa(f, opts);
  ScoreResult r;
  r.video_id = tr.video_id;
  r.spec_text = spec_text;
  r.probability = satisfaction_probability(d, tr);
  r.frames = tr.length();
  r.propositions = tr.props;
  return r;
}

}  // namespace vtl
