#pragma once

#include "expr.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crcartan {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Recursive descent over
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)? | '-' factor
//   atom   := rational | 'i' | ident | '(' expr ')'
// Exponents may carry a sign; a zero exponent is rejected.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool peek_digit() {
    skip_space();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::string digits() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(term());
      else if (accept('-'))
        terms.push_back(neg(term()));
      else
        break;
    }
    return add(terms);
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (accept('*'))
        acc = mul({acc, factor()});
      else if (accept('/'))
        acc = mul({acc, inv(factor())});
      else
        return acc;
    }
  }

  Expr factor() {
    if (accept('-')) return neg(factor());
    Expr base = atom();
    if (!accept('^')) return base;
    bool negative = accept('-');
    std::size_t at = pos_;
    mpz_class n(digits());
    if (n == 0) throw ParseError("zero exponent", at);
    if (!n.fits_slong_p()) throw ParseError("exponent out of range", at);
    long k = n.get_si();
    return pow(base, negative ? -k : k);
  }

  Expr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char ch = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch))) return rational_atom();
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "i") return imag_unit();
      if (auto x = VarId::from_name(name)) return variable(*x);
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    if (accept('(')) {
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  // integer ('/' positive-integer)? where the slash binds only to a digit run.
  Expr rational_atom() {
    mpz_class num(digits());
    std::size_t save = pos_;
    if (accept('/') && peek_digit()) {
      std::size_t at = pos_;
      mpz_class den(digits());
      if (den == 0) throw ParseError("zero denominator", at);
      return constant(GaussQ(Rational(num, den)));
    }
    pos_ = save;
    return constant(GaussQ(Rational(num)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace crcartan
