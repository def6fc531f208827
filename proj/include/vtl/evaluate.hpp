#pragma once

#include <string>

#include "vtl/errors.hpp"
#include "vtl/formula.hpp"
#include "vtl/trace.hpp"

namespace vtl {

namespace detail {

inline bool eval_at(const Formula& f, const BooleanTrace& w, std::size_t i) {
  const std::size_t T = w.length();
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom: {
      int idx = w.prop_index(f.atom_name());
      if (idx < 0)
        throw Error("tl-core", "proposition '" + f.atom_name() + "' outside the trace universe");
      return w.holds(i, idx);
    }
    case Op::Not:
      return !eval_at(f.left(), w, i);
    case Op::And:
      return eval_at(f.left(), w, i) && eval_at(f.right(), w, i);
    case Op::Or:
      return eval_at(f.left(), w, i) || eval_at(f.right(), w, i);
    case Op::Implies:
      return !eval_at(f.left(), w, i) || eval_at(f.right(), w, i);
    case Op::Next:
      return i + 1 < T && eval_at(f.left(), w, i + 1);
    case Op::WeakNext:
      return i + 1 >= T || eval_at(f.left(), w, i + 1);
    case Op::Eventually:
      for (std::size_t k = i; k < T; ++k)
        if (eval_at(f.left(), w, k)) return true;
      return false;
    case Op::Always:
      for (std::size_t k = i; k < T; ++k)
        if (!eval_at(f.left(), w, k)) return false;
      return true;
    case Op::Until:
      for (std::size_t k = i; k < T; ++k) {
        if (eval_at(f.right(), w, k)) return true;
        if (!eval_at(f.left(), w, k)) return false;
      }
      return false;
    case Op::Release:
      // right must hold up to and including the frame where left fires;
      // holding through the end of the trace also satisfies.
      for (std::size_t k = i; k < T; ++k) {
        if (!eval_at(f.right(), w, k)) return false;
        if (eval_at(f.left(), w, k)) return true;
      }
      return true;
    case Op::BoundedEventually:
    case Op::BoundedAlways:
      throw Error("tl-core", "bounded operator reached evaluate_trace; expand_bounds first");
  }
  throw Error("tl-core", "unreachable formula kind");
}

}  // namespace detail

/// Reference finite-trace semantics, by direct recursion over the formula.
/// This is the oracle the automaton and the probabilistic engine are checked
/// against. `f` must be bound-free; position i must satisfy 0 <= i < length.
inline bool evaluate_trace(const Formula& f, const BooleanTrace& w, std::size_t i = 0) {
  if (w.length() == 0) throw Error("tl-core", "empty trace");
  if (i >= w.length())
    throw Error("tl-core", "position " + std::to_string(i) + " out of range for trace of length " +
                               std::to_string(w.length()));
  return detail::eval_at(f, w, i);
}

}  // namespace vtl
