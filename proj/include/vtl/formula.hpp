#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vtl/errors.hpp"

namespace vtl {

/// Node kinds of a finite-trace temporal-logic formula.
enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,       // strong: a successor frame must exist
  WeakNext,   // weak: satisfied at the last frame
  Eventually,
  Always,
  Until,
  Release,
  BoundedEventually,  // F[lo,hi]
  BoundedAlways,      // G[lo,hi]
};

namespace detail {

// FNV-1a with fixed constants so structural hashes are stable across runs.
inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (i * 8)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// Immutable, shareable formula handle. Copies are cheap; subtrees are shared.
class Formula {
public:
  Formula() = default;

  static Formula boolean(bool v) { return build(v ? Op::True : Op::False, "", 0, 0, {}, {}); }
  static Formula atom(std::string name) {
    if (name.empty()) throw Error("tl-core", "empty proposition name");
    for (char c : name) {
      if (!is_atom_char(c))
        throw Error("tl-core", "invalid character in proposition name '" + name + "'");
    }
    return build(Op::Atom, std::move(name), 0, 0, {}, {});
  }
  static Formula negation(Formula f) { return unary(Op::Not, std::move(f)); }
  static Formula conjunction(Formula l, Formula r) { return binary(Op::And, std::move(l), std::move(r)); }
  static Formula disjunction(Formula l, Formula r) { return binary(Op::Or, std::move(l), std::move(r)); }
  static Formula implication(Formula l, Formula r) { return binary(Op::Implies, std::move(l), std::move(r)); }
  static Formula next(Formula f) { return unary(Op::Next, std::move(f)); }
  static Formula weak_next(Formula f) { return unary(Op::WeakNext, std::move(f)); }
  static Formula eventually(Formula f) { return unary(Op::Eventually, std::move(f)); }
  static Formula always(Formula f) { return unary(Op::Always, std::move(f)); }
  static Formula until(Formula l, Formula r) { return binary(Op::Until, std::move(l), std::move(r)); }
  static Formula release(Formula l, Formula r) { return binary(Op::Release, std::move(l), std::move(r)); }
  static Formula eventually_within(int lo, int hi, Formula f) {
    check_bounds(lo, hi);
    return build(Op::BoundedEventually, "", lo, hi, std::move(f), {});
  }
  static Formula always_within(int lo, int hi, Formula f) {
    check_bounds(lo, hi);
    return build(Op::BoundedAlways, "", lo, hi, std::move(f), {});
  }

  bool valid() const { return node_ != nullptr; }
  Op op() const { return node_->op; }
  const std::string& atom_name() const { return node_->name; }
  int lo() const { return node_->lo; }
  int hi() const { return node_->hi; }
  const Formula& left() const { return node_->left; }    // unary child lives here
  const Formula& right() const { return node_->right; }
  std::uint64_t hash() const { return node_->hash; }

  bool is_unary() const {
    switch (op()) {
      case Op::Not:
      case Op::Next:
      case Op::WeakNext:
      case Op::Eventually:
      case Op::Always:
      case Op::BoundedEventually:
      case Op::BoundedAlways:
        return true;
      default:
        return false;
    }
  }
  bool is_binary() const {
    switch (op()) {
      case Op::And:
      case Op::Or:
      case Op::Implies:
      case Op::Until:
      case Op::Release:
        return true;
      default:
        return false;
    }
  }
  bool is_constant() const { return op() == Op::True || op() == Op::False; }
  bool is_bounded() const { return op() == Op::BoundedEventually || op() == Op::BoundedAlways; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.hash() != b.hash()) return false;
    return structural_compare(a, b) == 0;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  /// Total structural order: op, then atom name / bounds, then children.
  static int structural_compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    switch (a.op()) {
      case Op::True:
      case Op::False:
        return 0;
      case Op::Atom: {
        int c = a.atom_name().compare(b.atom_name());
        return c < 0 ? -1 : c > 0 ? 1 : 0;
      }
      default:
        break;
    }
    if (a.is_bounded()) {
      if (a.lo() != b.lo()) return a.lo() < b.lo() ? -1 : 1;
      if (a.hi() != b.hi()) return a.hi() < b.hi() ? -1 : 1;
    }
    if (int c = structural_compare(a.left(), b.left()); c != 0) return c;
    if (a.is_binary()) return structural_compare(a.right(), b.right());
    return 0;
  }

  /// Sort key used by the canonicalizer: hash first, structure on ties.
  static bool canonical_less(const Formula& a, const Formula& b) {
    if (a.hash() != b.hash()) return a.hash() < b.hash();
    return structural_compare(a, b) < 0;
  }

  static bool is_atom_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

private:
  struct Node {
    Op op = Op::True;
    std::string name;  // Atom
    int lo = 0, hi = 0;
    Formula left, right;
    std::uint64_t hash = 0;
  };

  static void check_bounds(int lo, int hi) {
    if (lo < 0 || hi < 0) throw Error("tl-core", "negative bound");
    if (lo > hi)
      throw Error("tl-core", "bound error: lo " + std::to_string(lo) + " > hi " + std::to_string(hi));
  }

  static Formula unary(Op op, Formula child) { return build(op, "", 0, 0, std::move(child), {}); }
  static Formula binary(Op op, Formula l, Formula r) {
    return build(op, "", 0, 0, std::move(l), std::move(r));
  }

  static Formula build(Op op, std::string name, int lo, int hi, Formula l, Formula r) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->name = std::move(name);
    n->lo = lo;
    n->hi = hi;
    if (is_unary_op(op) || is_binary_op(op)) {
      if (!l.valid()) throw Error("tl-core", "null subformula");
      n->left = std::move(l);
    }
    if (is_binary_op(op)) {
      if (!r.valid()) throw Error("tl-core", "null subformula");
      n->right = std::move(r);
    }
    n->hash = hash_node(*n);
    Formula f;
    f.node_ = std::move(n);
    return f;
  }

  static bool is_unary_op(Op op) {
    return op == Op::Not || op == Op::Next || op == Op::WeakNext || op == Op::Eventually ||
           op == Op::Always || op == Op::BoundedEventually || op == Op::BoundedAlways;
  }
  static bool is_binary_op(Op op) {
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until || op == Op::Release;
  }

  static std::uint64_t hash_node(const Node& n) {
    std::uint64_t h = 1469598103934665603ull;
    h = detail::fnv1a(h, static_cast<std::uint64_t>(n.op));
    if (n.op == Op::Atom) h = detail::fnv1a(h, n.name);
    if (n.op == Op::BoundedEventually || n.op == Op::BoundedAlways) {
      h = detail::fnv1a(h, static_cast<std::uint64_t>(n.lo));
      h = detail::fnv1a(h, static_cast<std::uint64_t>(n.hi));
    }
    if (n.left.valid()) h = detail::fnv1a(h, n.left.hash());
    if (n.right.valid()) h = detail::fnv1a(h, n.right.hash());
    return h;
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return static_cast<std::size_t>(f.hash()); }
};

/// Distinct proposition names of a formula, sorted.
inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Atom) {
    out.insert(f.atom_name());
    return;
  }
  if (f.is_unary() || f.is_binary()) collect_atoms(f.left(), out);
  if (f.is_binary()) collect_atoms(f.right(), out);
}

inline std::vector<std::string> atoms_of(const Formula& f) {
  std::set<std::string> s;
  collect_atoms(f, s);
  return {s.begin(), s.end()};
}

/// Fully parenthesized rendering; re-parsing yields a structurally equal AST.
inline std::string format_formula(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return "true";
    case Op::False:
      return "false";
    case Op::Atom:
      return f.atom_name();
    case Op::Not:
      return "!(" + format_formula(f.left()) + ")";
    case Op::Next:
      return "X (" + format_formula(f.left()) + ")";
    case Op::WeakNext:
      return "N (" + format_formula(f.left()) + ")";
    case Op::Eventually:
      return "F (" + format_formula(f.left()) + ")";
    case Op::Always:
      return "G (" + format_formula(f.left()) + ")";
    case Op::BoundedEventually:
      return "F[" + std::to_string(f.lo()) + "," + std::to_string(f.hi()) + "] (" +
             format_formula(f.left()) + ")";
    case Op::BoundedAlways:
      return "G[" + std::to_string(f.lo()) + "," + std::to_string(f.hi()) + "] (" +
             format_formula(f.left()) + ")";
    case Op::And:
      return "(" + format_formula(f.left()) + ") & (" + format_formula(f.right()) + ")";
    case Op::Or:
      return "(" + format_formula(f.left()) + ") | (" + format_formula(f.right()) + ")";
    case Op::Implies:
      return "(" + format_formula(f.left()) + ") -> (" + format_formula(f.right()) + ")";
    case Op::Until:
      return "(" + format_formula(f.left()) + ") U (" + format_formula(f.right()) + ")";
    case Op::Release:
      return "(" + format_formula(f.left()) + ") R (" + format_formula(f.right()) + ")";
  }
  throw Error("tl-core", "unreachable formula kind");
}

}  // namespace vtl
