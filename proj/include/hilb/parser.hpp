#pragma once
#include "hilb/field.hpp"
#include <cctype>

namespace hilb {

/// Recursive-descent parser for fixture/test expressions over the six
/// variables, rational constants and the imaginary unit `i`.
/// Fractional exponents (only on bare variables): a^(1/2), h^(-3/2).
class ExprParser {
 public:
  static FieldElement parse(const std::string& s) {
    ExprParser p(s);
    FieldElement r = p.expr();
    p.skip();
    if (p.pos_ != s.size()) throw std::domain_error("parse error at '" + s.substr(p.pos_) + "'");
    return r;
  }

 private:
  explicit ExprParser(const std::string& s) : s_(s) {}

  const std::string& s_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  FieldElement expr() {
    FieldElement v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }

  FieldElement term() {
    FieldElement v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  FieldElement unary() {
    if (eat('-')) return -unary();
    return power();
  }

  FieldElement power() {
    skip();
    // variable with possibly fractional exponent
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      std::string id = ident();
      if (id == "i") {
        FieldElement base(GaussRational::unit_i());
        if (eat('^')) return base.pow_int(int_exponent());
        return base;
      }
      int v = var_index(id);
      if (eat('^')) {
        Rational64 e = exponent();
        return fe_var(v, e);
      }
      return fe_var(v);
    }
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      Rat n = number();
      FieldElement base = fe_rat(n);
      if (eat('^')) return base.pow_int(int_exponent());
      return base;
    }
    if (eat('(')) {
      FieldElement v = expr();
      if (!eat(')')) throw std::domain_error("expected ')'");
      if (eat('^')) return v.pow_int(int_exponent());
      return v;
    }
    throw std::domain_error("parse error near '" + s_.substr(pos_) + "'");
  }

  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_]))))
      ++pos_;
    return s_.substr(b, pos_ - b);
  }

  Rat number() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return Rat(s_.substr(b, pos_ - b));
  }

  long int_part() {
    bool neg = eat('-');
    Rat n = number();
    long v = long(n.get_num().get_si());
    return neg ? -v : v;
  }

  long int_exponent() {
    if (eat('(')) {
      long v = int_part();
      if (!eat(')')) throw std::domain_error("expected ')' in exponent");
      return v;
    }
    return int_part();
  }

  Rational64 exponent() {
    if (eat('(')) {
      long p = int_part();
      long q = 1;
      if (eat('/')) q = int_part();
      if (!eat(')')) throw std::domain_error("expected ')' in exponent");
      return Rational64(p, q);
    }
    return Rational64(int_part());
  }
};

inline FieldElement fe_parse(const std::string& s) { return ExprParser::parse(s); }

} // namespace hilb
