#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vtl/errors.hpp"
#include "vtl/formula.hpp"

namespace vtl {

// Specification grammar (documented in SPEC_LANGUAGE.md).
//
//   formula := or_expr ('->' formula)?            right-associative
//   or_expr := and_expr ('|' and_expr)*
//   and_expr := until_expr ('&' until_expr)*
//   until_expr := unary (('U'|'R') until_expr)?   right-associative
//   unary := '!' unary | 'X' unary | 'N' unary
//          | 'F' bounds? unary | 'G' bounds? unary | primary
//   bounds := '[' int ',' int ']'
//   primary := 'true' | 'false' | name | '(' formula ')'
//
// Names are nonempty runs of [a-zA-Z0-9_]; X N F G U R true false are reserved.

namespace detail {

enum class TokKind { Bang, Amp, Pipe, Arrow, LParen, RParen, LBracket, RBracket, Comma, Word, End };

struct Token {
  TokKind kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> lex_spec(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    std::size_t start = i;
    switch (c) {
      case '!': out.push_back({TokKind::Bang, "!", start}); ++i; continue;
      case '&': out.push_back({TokKind::Amp, "&", start}); ++i; continue;
      case '|': out.push_back({TokKind::Pipe, "|", start}); ++i; continue;
      case '(': out.push_back({TokKind::LParen, "(", start}); ++i; continue;
      case ')': out.push_back({TokKind::RParen, ")", start}); ++i; continue;
      case '[': out.push_back({TokKind::LBracket, "[", start}); ++i; continue;
      case ']': out.push_back({TokKind::RBracket, "]", start}); ++i; continue;
      case ',': out.push_back({TokKind::Comma, ",", start}); ++i; continue;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({TokKind::Arrow, "->", start});
          i += 2;
          continue;
        }
        throw ParseError(start, "lexical error: '-' must begin '->'");
      default:
        break;
    }
    if (Formula::is_atom_char(c)) {
      std::size_t j = i;
      while (j < text.size() && Formula::is_atom_char(text[j])) ++j;
      out.push_back({TokKind::Word, std::string(text.substr(i, j - i)), start});
      i = j;
      continue;
    }
    throw ParseError(start, std::string("lexical error: unexpected character '") + c + "'");
  }
  out.push_back({TokKind::End, "", text.size()});
  return out;
}

class SpecParser {
public:
  explicit SpecParser(std::string_view text) : toks_(lex_spec(text)) {}

  Formula parse() {
    Formula f = parse_implies();
    if (peek().kind != TokKind::End)
      throw ParseError(peek().pos, "syntax error: unparsed trailing input '" + peek().text + "'");
    return f;
  }

private:
  const Token& peek() const { return toks_[idx_]; }
  Token take() { return toks_[idx_++]; }
  bool word_is(const Token& t, std::string_view w) const {
    return t.kind == TokKind::Word && t.text == w;
  }

  Formula parse_implies() {
    Formula l = parse_or();
    if (peek().kind == TokKind::Arrow) {
      take();
      return Formula::implication(std::move(l), parse_implies());
    }
    return l;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (peek().kind == TokKind::Pipe) {
      take();
      l = Formula::disjunction(std::move(l), parse_and());
    }
    return l;
  }

  Formula parse_and() {
    Formula l = parse_until();
    while (peek().kind == TokKind::Amp) {
      take();
      l = Formula::conjunction(std::move(l), parse_until());
    }
    return l;
  }

  Formula parse_until() {
    Formula l = parse_unary();
    if (word_is(peek(), "U")) {
      take();
      return Formula::until(std::move(l), parse_until());
    }
    if (word_is(peek(), "R")) {
      take();
      return Formula::release(std::move(l), parse_until());
    }
    return l;
  }

  Formula parse_unary() {
    const Token& t = peek();
    if (t.kind == TokKind::Bang) {
      take();
      return Formula::negation(parse_unary());
    }
    if (word_is(t, "X")) {
      take();
      return Formula::next(parse_unary());
    }
    if (word_is(t, "N")) {
      take();
      return Formula::weak_next(parse_unary());
    }
    if (word_is(t, "F") || word_is(t, "G")) {
      bool is_f = t.text == "F";
      take();
      if (peek().kind == TokKind::LBracket) {
        auto [lo, hi] = parse_bounds();
        Formula sub = parse_unary();
        return is_f ? Formula::eventually_within(lo, hi, std::move(sub))
                    : Formula::always_within(lo, hi, std::move(sub));
      }
      Formula sub = parse_unary();
      return is_f ? Formula::eventually(std::move(sub)) : Formula::always(std::move(sub));
    }
    return parse_primary();
  }

  std::pair<int, int> parse_bounds() {
    expect(TokKind::LBracket, "'['");
    int lo = parse_bound_value();
    expect(TokKind::Comma, "','");
    std::size_t hi_pos = peek().pos;
    int hi = parse_bound_value();
    expect(TokKind::RBracket, "']'");
    if (lo > hi)
      throw ParseError(hi_pos, "bound error: lo " + std::to_string(lo) + " > hi " + std::to_string(hi));
    return {lo, hi};
  }

  int parse_bound_value() {
    const Token& t = peek();
    if (t.kind != TokKind::Word)
      throw ParseError(t.pos, "syntax error: expected bound integer, found '" + t.text + "'");
    for (char c : t.text)
      if (c < '0' || c > '9')
        throw ParseError(t.pos, "syntax error: bound must be a nonnegative integer, found '" + t.text + "'");
    if (t.text.size() > 9)
      throw ParseError(t.pos, "bound error: bound '" + t.text + "' too large");
    take();
    return std::stoi(t.text);
  }

  Formula parse_primary() {
    const Token& t = peek();
    if (t.kind == TokKind::LParen) {
      take();
      Formula f = parse_implies();
      expect(TokKind::RParen, "')'");
      return f;
    }
    if (t.kind == TokKind::Word) {
      if (t.text == "true") {
        take();
        return Formula::boolean(true);
      }
      if (t.text == "false") {
        take();
        return Formula::boolean(false);
      }
      if (t.text == "U" || t.text == "R" || t.text == "X" || t.text == "N" || t.text == "F" ||
          t.text == "G")
        throw ParseError(t.pos, "syntax error: unexpected operator '" + t.text +
                                    "'; expected '!', '(', 'true', 'false', or a proposition");
      take();
      return Formula::atom(t.text);
    }
    throw ParseError(t.pos, "syntax error: expected '!', '(', 'true', 'false', a temporal operator, "
                            "or a proposition; found '" +
                                (t.kind == TokKind::End ? std::string("end of input") : t.text) + "'");
  }

  void expect(TokKind k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError(peek().pos, "syntax error: expected " + what + ", found '" +
                                       (peek().kind == TokKind::End ? std::string("end of input")
                                                                    : peek().text) +
                                       "'");
    take();
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

}  // namespace detail

/// Parse a specification string into a Formula. Throws ParseError with the
/// character offset on lexical errors, syntax errors, and lo > hi bounds.
inline Formula parse_formula(std::string_view text) { return detail::SpecParser(text).parse(); }

}  // namespace vtl
