#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "vtl/errors.hpp"
#include "vtl/evaluate.hpp"
#include "vtl/formula.hpp"
#include "vtl/rewrite.hpp"
#include "vtl/trace.hpp"

namespace vtl {

constexpr int kDefaultStateCap = 10000;
constexpr int kMaxAlphabetProps = 16;

/// Does the residual obligation hold once no frames remain?
/// Universally quantified obligations (G, R, N) are satisfied by the empty
/// suffix; anything that demands a position (a literal, X, F, U) is not.
inline bool empty_suffix_accepts(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom:
      return false;
    case Op::Not:
      if (f.left().op() != Op::Atom) throw Error("automaton", "empty_suffix_accepts requires NNF");
      return false;
    case Op::And:
      return empty_suffix_accepts(f.left()) && empty_suffix_accepts(f.right());
    case Op::Or:
      return empty_suffix_accepts(f.left()) || empty_suffix_accepts(f.right());
    case Op::Next:
      return false;
    case Op::WeakNext:
      return true;
    case Op::Eventually:
      return false;
    case Op::Always:
      return true;
    case Op::Until:
      return false;
    case Op::Release:
      return true;
    default:
      throw Error("automaton", "empty_suffix_accepts requires an NNF bound-free formula");
  }
}

namespace detail {

// Residual markers distinguishing strong from weak next once the trace may
// end: "F true" holds on every nonempty suffix and fails on the empty one,
// "G false" is the exact complement. Progression discharges both after one
// frame (prog(F true) = true, prog(G false) = false), so they only influence
// acceptance at the residual where they appear.
inline Formula alive_marker() { return Formula::eventually(Formula::boolean(true)); }
inline Formula dead_marker() { return Formula::always(Formula::boolean(false)); }

inline Formula progress_raw(const Formula& f, std::uint32_t assignment,
                            const std::unordered_map<std::string, int>& prop_index) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom: {
      auto it = prop_index.find(f.atom_name());
      if (it == prop_index.end())
        throw Error("automaton", "proposition '" + f.atom_name() + "' outside the automaton universe");
      return Formula::boolean((assignment >> it->second) & 1u);
    }
    case Op::Not: {
      if (f.left().op() != Op::Atom) throw Error("automaton", "progress requires NNF");
      auto it = prop_index.find(f.left().atom_name());
      if (it == prop_index.end())
        throw Error("automaton",
                    "proposition '" + f.left().atom_name() + "' outside the automaton universe");
      return Formula::boolean(!((assignment >> it->second) & 1u));
    }
    case Op::And:
      return Formula::conjunction(progress_raw(f.left(), assignment, prop_index),
                                  progress_raw(f.right(), assignment, prop_index));
    case Op::Or:
      return Formula::disjunction(progress_raw(f.left(), assignment, prop_index),
                                  progress_raw(f.right(), assignment, prop_index));
    case Op::Next:
      // The obligation moves to the suffix, which must be nonempty.
      return Formula::conjunction(f.left(), alive_marker());
    case Op::WeakNext:
      // Satisfied outright if the consumed frame was the last one.
      return Formula::disjunction(f.left(), dead_marker());
    case Op::Eventually:
      return Formula::disjunction(progress_raw(f.left(), assignment, prop_index), f);
    case Op::Always:
      return Formula::conjunction(progress_raw(f.left(), assignment, prop_index), f);
    case Op::Until:
      return Formula::disjunction(
          progress_raw(f.right(), assignment, prop_index),
          Formula::conjunction(progress_raw(f.left(), assignment, prop_index), f));
    case Op::Release:
      return Formula::conjunction(
          progress_raw(f.right(), assignment, prop_index),
          Formula::disjunction(progress_raw(f.left(), assignment, prop_index), f));
    default:
      throw Error("automaton", "progress requires an NNF bound-free formula");
  }
}

}  // namespace detail

/// One-step residual of an NNF bound-free formula against one assignment,
/// canonicalized. Bit i of `assignment` is the truth of prop_index entry i.
inline Formula progress(const Formula& f, std::uint32_t assignment,
                        const std::unordered_map<std::string, int>& prop_index) {
  return canonical(detail::progress_raw(f, assignment, prop_index));
}

/// Convenience overload: assignment given as a set of true proposition names
/// over the formula's own proposition set.
inline Formula progress(const Formula& f, const std::set<std::string>& true_props) {
  std::unordered_map<std::string, int> index;
  auto props = atoms_of(f);
  for (std::size_t i = 0; i < props.size(); ++i) index[props[i]] = static_cast<int>(i);
  std::uint32_t mask = 0;
  for (const auto& name : true_props) {
    auto it = index.find(name);
    if (it != index.end()) mask |= 1u << it->second;
  }
  return progress(f, mask, index);
}

/// Deterministic finite automaton over assignments of an ordered proposition
/// set. State 0 is initial; every state stores its canonical residual.
/// Transitions are total: next[q][a] for every assignment index a in
/// [0, 2^|props|). Immutable once compiled.
struct Dfa {
  std::vector<std::string> props;
  std::vector<Formula> residuals;
  std::vector<std::vector<std::uint32_t>> next;
  std::vector<bool> accepting;

  std::size_t num_states() const { return residuals.size(); }
  std::size_t alphabet_size() const { return std::size_t{1} << props.size(); }

  int state_of(const Formula& residual) const {
    for (std::size_t i = 0; i < residuals.size(); ++i)
      if (residuals[i] == residual) return static_cast<int>(i);
    return -1;
  }
  int true_sink() const { return state_of(Formula::boolean(true)); }
  int false_sink() const { return state_of(Formula::boolean(false)); }
};

struct CompileOptions {
  int state_cap = kDefaultStateCap;
  int expansion_cap = kDefaultExpansionCap;
  /// Optional explicit universe; must contain every proposition of the
  /// formula. Defaults to the formula's own propositions.
  std::vector<std::string> universe;
};

/// Compile an arbitrary formula to a Dfa: NNF conversion and bound expansion
/// first, then breadth-first exploration of canonical residuals under
/// progression. Deterministic and total by construction.
inline Dfa compile_dfa(const Formula& f, const CompileOptions& opts = {}) {
  Formula g = canonical(expand_bounds(to_nnf(f), opts.expansion_cap));

  Dfa d;
  d.props = opts.universe.empty() ? atoms_of(f) : opts.universe;
  if (!opts.universe.empty()) {
    for (const auto& p : atoms_of(f))
      if (std::find(d.props.begin(), d.props.end(), p) == d.props.end())
        throw Error("automaton", "universe missing proposition '" + p + "'");
  }
  if (static_cast<int>(d.props.size()) > kMaxAlphabetProps)
    throw Error("automaton", "alphabet cap exceeded: " + std::to_string(d.props.size()) +
                                 " propositions, limit " + std::to_string(kMaxAlphabetProps));

  std::unordered_map<std::string, int> prop_index;
  for (std::size_t i = 0; i < d.props.size(); ++i) prop_index[d.props[i]] = static_cast<int>(i);

  const std::uint32_t n_assignments = static_cast<std::uint32_t>(d.alphabet_size());
  std::unordered_map<Formula, std::uint32_t, FormulaHash> ids;
  std::deque<std::uint32_t> queue;

  auto intern = [&](const Formula& residual) -> std::uint32_t {
    auto it = ids.find(residual);
    if (it != ids.end()) return it->second;
    if (d.residuals.size() >= static_cast<std::size_t>(opts.state_cap))
      throw Error("automaton", "state cap " + std::to_string(opts.state_cap) +
                                   " exceeded compiling " + format_formula(f));
    std::uint32_t id = static_cast<std::uint32_t>(d.residuals.size());
    ids.emplace(residual, id);
    d.residuals.push_back(residual);
    d.accepting.push_back(empty_suffix_accepts(residual));
    d.next.emplace_back();
    queue.push_back(id);
    return id;
  };

  intern(g);
  while (!queue.empty()) {
    std::uint32_t q = queue.front();
    queue.pop_front();
    Formula residual = d.residuals[q];
    std::vector<std::uint32_t> row(n_assignments);
    for (std::uint32_t a = 0; a < n_assignments; ++a)
      row[a] = intern(progress(residual, a, prop_index));
    d.next[q] = std::move(row);
  }
  return d;
}

/// Run the automaton over a boolean trace; acceptance of the final residual
/// decides. Equals evaluate_trace(f, w, 0) for the compiled formula.
inline bool dfa_accepts(const Dfa& d, const BooleanTrace& w) {
  if (w.length() == 0) throw Error("automaton", "empty trace");
  std::vector<int> bit_of(d.props.size());
  for (std::size_t i = 0; i < d.props.size(); ++i) {
    int idx = w.prop_index(d.props[i]);
    if (idx < 0)
      throw Error("automaton", "universe mismatch: trace is missing proposition '" + d.props[i] + "'");
    bit_of[i] = idx;
  }
  std::uint32_t q = 0;
  for (std::size_t t = 0; t < w.length(); ++t) {
    std::uint32_t a = 0;
    for (std::size_t i = 0; i < d.props.size(); ++i)
      a |= ((w.frames[t] >> bit_of[i]) & 1u) << i;
    q = d.next[q][a];
  }
  return d.accepting[q];
}

/// Debug listing: `state <id> [accepting] residual=<formula>` lines followed
/// by `<id> --<bits>--> <id>` transitions; character i of <bits> is the truth
/// of props[i].
inline std::string export_dfa(const Dfa& d) {
  std::string out;
  for (std::size_t q = 0; q < d.num_states(); ++q) {
    out += "state " + std::to_string(q);
    if (d.accepting[q]) out += " accepting";
    out += " residual=" + format_formula(d.residuals[q]) + "\n";
  }
  for (std::size_t q = 0; q < d.num_states(); ++q) {
    for (std::size_t a = 0; a < d.alphabet_size(); ++a) {
      std::string bits(d.props.size(), '0');
      for (std::size_t i = 0; i < d.props.size(); ++i)
        if ((a >> i) & 1u) bits[i] = '1';
      out += std::to_string(q) + " --" + bits + "--> " + std::to_string(d.next[q][a]) + "\n";
    }
  }
  return out;
}

}  // namespace vtl
