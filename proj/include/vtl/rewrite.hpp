#pragma once

#include <algorithm>
#include <vector>

#include "vtl/errors.hpp"
#include "vtl/formula.hpp"

namespace vtl {

/// Negation normal form: Implies eliminated, Not pushed down to atoms via the
/// finite-trace dualities (!X f = N !f, !F f = G !f, !(f U g) = !f R !g, and
/// the bounded duals). Semantics preserved.
inline Formula to_nnf(const Formula& f, bool negated = false) {
  switch (f.op()) {
    case Op::True:
      return Formula::boolean(!negated);
    case Op::False:
      return Formula::boolean(negated);
    case Op::Atom:
      return negated ? Formula::negation(f) : f;
    case Op::Not:
      return to_nnf(f.left(), !negated);
    case Op::And: {
      Formula l = to_nnf(f.left(), negated), r = to_nnf(f.right(), negated);
      return negated ? Formula::disjunction(std::move(l), std::move(r))
                     : Formula::conjunction(std::move(l), std::move(r));
    }
    case Op::Or: {
      Formula l = to_nnf(f.left(), negated), r = to_nnf(f.right(), negated);
      return negated ? Formula::conjunction(std::move(l), std::move(r))
                     : Formula::disjunction(std::move(l), std::move(r));
    }
    case Op::Implies: {
      // a -> b  ==  !a | b
      Formula l = to_nnf(f.left(), !negated), r = to_nnf(f.right(), negated);
      return negated ? Formula::conjunction(std::move(l), std::move(r))
                     : Formula::disjunction(std::move(l), std::move(r));
    }
    case Op::Next: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::weak_next(std::move(sub)) : Formula::next(std::move(sub));
    }
    case Op::WeakNext: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::next(std::move(sub)) : Formula::weak_next(std::move(sub));
    }
    case Op::Eventually: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::always(std::move(sub)) : Formula::eventually(std::move(sub));
    }
    case Op::Always: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::eventually(std::move(sub)) : Formula::always(std::move(sub));
    }
    case Op::Until: {
      Formula l = to_nnf(f.left(), negated), r = to_nnf(f.right(), negated);
      return negated ? Formula::release(std::move(l), std::move(r))
                     : Formula::until(std::move(l), std::move(r));
    }
    case Op::Release: {
      Formula l = to_nnf(f.left(), negated), r = to_nnf(f.right(), negated);
      return negated ? Formula::until(std::move(l), std::move(r))
                     : Formula::release(std::move(l), std::move(r));
    }
    case Op::BoundedEventually: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::always_within(f.lo(), f.hi(), std::move(sub))
                     : Formula::eventually_within(f.lo(), f.hi(), std::move(sub));
    }
    case Op::BoundedAlways: {
      Formula sub = to_nnf(f.left(), negated);
      return negated ? Formula::eventually_within(f.lo(), f.hi(), std::move(sub))
                     : Formula::always_within(f.lo(), f.hi(), std::move(sub));
    }
  }
  throw Error("tl-core", "unreachable formula kind");
}

inline bool is_nnf(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return true;
    case Op::Not:
      return f.left().op() == Op::Atom;
    case Op::Implies:
      return false;
    default:
      if (f.is_binary()) return is_nnf(f.left()) && is_nnf(f.right());
      return is_nnf(f.left());
  }
}

constexpr int kDefaultExpansionCap = 10000;

/// Remove bounded operators by unrolling:
///   F[0,0]g = g          F[0,b]g = g | X F[0,b-1]g     F[a,b]g = X F[a-1,b-1]g
///   G[0,0]g = g          G[0,b]g = g & N G[0,b-1]g     G[a,b]g = N G[a-1,b-1]g
/// F unrolls through strong next (the deadline window must exist); G through
/// weak next (a trace ending early does not violate the invariant).
inline Formula expand_bounds(const Formula& f, int cap = kDefaultExpansionCap) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::BoundedEventually:
    case Op::BoundedAlways: {
      const bool is_f = f.op() == Op::BoundedEventually;
      if (f.hi() - f.lo() > cap || f.lo() > cap)
        throw Error("tl-core", "expansion size cap exceeded: " + std::to_string(f.lo()) + "," +
                                   std::to_string(f.hi()) + " beyond limit " + std::to_string(cap));
      Formula body = expand_bounds(f.left(), cap);
      Formula acc = body;
      for (int k = 0; k < f.hi() - f.lo(); ++k) {
        acc = is_f ? Formula::disjunction(body, Formula::next(std::move(acc)))
                   : Formula::conjunction(body, Formula::weak_next(std::move(acc)));
      }
      for (int k = 0; k < f.lo(); ++k)
        acc = is_f ? Formula::next(std::move(acc)) : Formula::weak_next(std::move(acc));
      return acc;
    }
    default: {
      if (f.is_binary()) {
        Formula l = expand_bounds(f.left(), cap), r = expand_bounds(f.right(), cap);
        switch (f.op()) {
          case Op::And: return Formula::conjunction(std::move(l), std::move(r));
          case Op::Or: return Formula::disjunction(std::move(l), std::move(r));
          case Op::Implies: return Formula::implication(std::move(l), std::move(r));
          case Op::Until: return Formula::until(std::move(l), std::move(r));
          case Op::Release: return Formula::release(std::move(l), std::move(r));
          default: break;
        }
      }
      Formula sub = expand_bounds(f.left(), cap);
      switch (f.op()) {
        case Op::Not: return Formula::negation(std::move(sub));
        case Op::Next: return Formula::next(std::move(sub));
        case Op::WeakNext: return Formula::weak_next(std::move(sub));
        case Op::Eventually: return Formula::eventually(std::move(sub));
        case Op::Always: return Formula::always(std::move(sub));
        default: break;
      }
    }
  }
  throw Error("tl-core", "unreachable formula kind");
}

inline bool is_bound_free(const Formula& f) {
  if (f.is_bounded()) return false;
  if (f.is_binary()) return is_bound_free(f.left()) && is_bound_free(f.right());
  if (f.is_unary()) return is_bound_free(f.left());
  return true;
}

namespace detail {

inline void flatten_into(const Formula& f, Op op, std::vector<Formula>& out) {
  if (f.op() == op) {
    flatten_into(f.left(), op, out);
    flatten_into(f.right(), op, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace detail

/// Canonical form for automaton-state identity: nested And/Or chains are
/// flattened, constants absorbed, duplicates removed, and operands rebuilt
/// right-nested in (hash, structural) order. No boolean reasoning beyond
/// constant folding happens here; structurally equal residuals map to the
/// same state and that is all the automaton needs.
inline Formula canonical(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::And:
    case Op::Or: {
      const bool is_and = f.op() == Op::And;
      std::vector<Formula> parts;
      detail::flatten_into(f, f.op(), parts);
      std::vector<Formula> kept;
      kept.reserve(parts.size());
      for (auto& p : parts) {
        Formula c = canonical(p);
        if (c.op() == (is_and ? Op::False : Op::True)) return c;  // absorbing constant
        if (c.op() == (is_and ? Op::True : Op::False)) continue;  // neutral constant
        kept.push_back(std::move(c));
      }
      if (kept.empty()) return Formula::boolean(is_and);
      std::sort(kept.begin(), kept.end(), Formula::canonical_less);
      kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
      Formula acc = kept.back();
      for (auto it = kept.rbegin() + 1; it != kept.rend(); ++it)
        acc = is_and ? Formula::conjunction(*it, std::move(acc))
                     : Formula::disjunction(*it, std::move(acc));
      return acc;
    }
    default: {
      if (f.is_binary()) {
        Formula l = canonical(f.left()), r = canonical(f.right());
        switch (f.op()) {
          case Op::Implies: return Formula::implication(std::move(l), std::move(r));
          case Op::Until: return Formula::until(std::move(l), std::move(r));
          case Op::Release: return Formula::release(std::move(l), std::move(r));
          default: break;
        }
      }
      Formula sub = canonical(f.left());
      switch (f.op()) {
        case Op::Not: return Formula::negation(std::move(sub));
        case Op::Next: return Formula::next(std::move(sub));
        case Op::WeakNext: return Formula::weak_next(std::move(sub));
        case Op::Eventually: return Formula::eventually(std::move(sub));
        case Op::Always: return Formula::always(std::move(sub));
        case Op::BoundedEventually: return Formula::eventually_within(f.lo(), f.hi(), std::move(sub));
        case Op::BoundedAlways: return Formula::always_within(f.lo(), f.hi(), std::move(sub));
        default: break;
      }
    }
  }
  throw Error("tl-core", "unreachable formula kind");
}

}  // namespace vtl
