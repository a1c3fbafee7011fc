#pragma once
#include "hilb/field.hpp"
#include <string>
#include <vector>

namespace hilb {

struct Singular : std::domain_error {
  explicit Singular(const std::string& m) : std::domain_error(m) {}
};

/// Square matrix of FieldElements indexed by partitions of n in the
/// canonical (lex-descending) order; also used for generic square blocks.
class OpMatrix {
 public:
  OpMatrix() = default;
  OpMatrix(int n, int side, std::string order_tag = {})
      : n_(n), side_(side), tag_(std::move(order_tag)),
        e_(std::size_t(side) * side, FieldElement::zero()) {}

  static OpMatrix identity(int n, int side) {
    OpMatrix m(n, side);
    for (int i = 0; i < side; ++i) m.at(i, i) = FieldElement::one();
    return m;
  }
  static OpMatrix diagonal(int n, std::vector<FieldElement> d) {
    OpMatrix m(n, int(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m.at(int(i), int(i)) = std::move(d[i]);
    return m;
  }

  int n() const { return n_; }
  int side() const { return side_; }
  const std::string& order_tag() const { return tag_; }
  void set_order_tag(std::string t) { tag_ = std::move(t); }

  FieldElement& at(int i, int j) { return e_[std::size_t(i) * side_ + j]; }
  const FieldElement& at(int i, int j) const { return e_[std::size_t(i) * side_ + j]; }

  friend OpMatrix operator*(const OpMatrix& x, const OpMatrix& y) {
    OpMatrix r(x.n_, x.side_, x.tag_);
    for (int i = 0; i < x.side_; ++i)
      for (int j = 0; j < x.side_; ++j) {
        FieldElement s = FieldElement::zero();
        for (int k = 0; k < x.side_; ++k) {
          if (x.at(i, k).is_zero() || y.at(k, j).is_zero()) continue;
          s += x.at(i, k) * y.at(k, j);
        }
        r.at(i, j) = std::move(s);
      }
    return r;
  }
  friend OpMatrix operator+(const OpMatrix& x, const OpMatrix& y) {
    OpMatrix r(x.n_, x.side_, x.tag_);
    for (int i = 0; i < x.side_; ++i)
      for (int j = 0; j < x.side_; ++j) r.at(i, j) = x.at(i, j) + y.at(i, j);
    return r;
  }
  friend OpMatrix operator-(const OpMatrix& x, const OpMatrix& y) {
    OpMatrix r(x.n_, x.side_, x.tag_);
    for (int i = 0; i < x.side_; ++i)
      for (int j = 0; j < x.side_; ++j) r.at(i, j) = x.at(i, j) - y.at(i, j);
    return r;
  }
  friend OpMatrix operator*(const FieldElement& c, OpMatrix m) {
    for (auto& v : m.e_) v = c * v;
    return m;
  }

  friend bool operator==(const OpMatrix& x, const OpMatrix& y) {
    if (x.side_ != y.side_) return false;
    for (std::size_t i = 0; i < x.e_.size(); ++i)
      if (x.e_[i] != y.e_[i]) return false;
    return true;
  }
  friend bool operator!=(const OpMatrix& x, const OpMatrix& y) { return !(x == y); }

  bool is_identity() const { return *this == identity(n_, side_); }
  bool is_diagonal() const {
    for (int i = 0; i < side_; ++i)
      for (int j = 0; j < side_; ++j)
        if (i != j && !at(i, j).is_zero()) return false;
    return true;
  }

  OpMatrix transpose() const {
    OpMatrix r(n_, side_, tag_);
    for (int i = 0; i < side_; ++i)
      for (int j = 0; j < side_; ++j) r.at(i, j) = at(j, i);
    return r;
  }

  OpMatrix map(const std::function<FieldElement(const FieldElement&)>& f) const {
    OpMatrix r(n_, side_, tag_);
    for (int i = 0; i < side_; ++i)
      for (int j = 0; j < side_; ++j) r.at(i, j) = f(at(i, j));
    return r;
  }

  OpMatrix substitute(const SubstMap& s) const {
    return map([&](const FieldElement& x) { return x.substitute(s); });
  }

  /// Fraction-free (Bareiss) elimination on the augmented block [M | I]:
  /// rows are first cleared of denominators so every elimination division
  /// is an exact polynomial division, then back substitution re-enters the
  /// fraction field only at the end.
  OpMatrix inverse() const {
    int s = side_;
    std::vector<std::vector<Poly>> M(s, std::vector<Poly>(2 * s, Poly()));
    for (int i = 0; i < s; ++i) {
      FieldElement rowden = FieldElement::one();
      for (int j = 0; j < s; ++j)
        if (!at(i, j).den().is_constant()) rowden *= FieldElement(at(i, j).den());
      for (int j = 0; j < s; ++j) {
        FieldElement v = at(i, j) * rowden;
        if (!v.den().is_constant()) throw std::logic_error("inverse: row clearing failed");
        Poly p = v.num();
        p.scale(GaussRational(1) / v.den().constant_value());
        M[i][j] = std::move(p);
      }
      Poly p = rowden.num();
      p.scale(GaussRational(1) / rowden.den().constant_value());
      M[i][s + i] = std::move(p);
    }
    Poly div_prev(1);
    for (int k = 0; k < s; ++k) {
      int piv = -1;
      std::size_t best = SIZE_MAX;
      for (int i = k; i < s; ++i) {
        if (M[i][k].is_zero()) continue;
        if (M[i][k].size() < best) { best = M[i][k].size(); piv = i; }
      }
      if (piv < 0) throw Singular("mat_inverse: zero pivot column");
      if (piv != k) std::swap(M[piv], M[k]);
      if (k == s - 1) break;
      const Poly pivot = M[k][k];
      for (int i = k + 1; i < s; ++i) {
        for (int j = k + 1; j < 2 * s; ++j) {
          Poly t = M[i][j] * pivot - M[i][k] * M[k][j];
          if (t.is_zero()) { M[i][j] = Poly(); continue; }
          auto q = poly_exact_div(t, div_prev);
          if (!q) throw std::logic_error("inverse: Bareiss division not exact");
          M[i][j] = std::move(*q);
        }
        M[i][k] = Poly();
      }
      div_prev = pivot;
    }
    if (M[s - 1][s - 1].is_zero()) throw Singular("mat_inverse: singular matrix");
    OpMatrix r(n_, s, tag_);
    for (int c = 0; c < s; ++c) {
      std::vector<FieldElement> x(s, FieldElement::zero());
      for (int i = s - 1; i >= 0; --i) {
        FieldElement sum{M[i][s + c]};
        for (int j = i + 1; j < s; ++j) sum -= FieldElement(M[i][j]) * x[j];
        x[i] = sum / FieldElement(M[i][i]);
      }
      for (int i = 0; i < s; ++i) r.at(i, c) = std::move(x[i]);
    }
    return r;
  }

  FieldElement det() const {
    int s = side_;
    std::vector<std::vector<FieldElement>> M(s, std::vector<FieldElement>(s));
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) M[i][j] = at(i, j);
    FieldElement div_prev = FieldElement::one();
    int sign = 1;
    for (int k = 0; k + 1 < s; ++k) {
      int piv = -1;
      for (int i = k; i < s; ++i)
        if (!M[i][k].is_zero()) { piv = i; break; }
      if (piv < 0) return FieldElement::zero();
      if (piv != k) { std::swap(M[piv], M[k]); sign = -sign; }
      for (int i = k + 1; i < s; ++i) {
        for (int j = k + 1; j < s; ++j)
          M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / div_prev;
        M[i][k] = FieldElement::zero();
      }
      div_prev = M[k][k];
    }
    FieldElement d = M[s - 1][s - 1];
    return sign < 0 ? -d : d;
  }

  std::vector<std::vector<std::complex<double>>> evaluate(
      const std::array<std::complex<double>, NVARS>& assign) const {
    std::vector<std::vector<std::complex<double>>> r(side_, std::vector<std::complex<double>>(side_));
    for (int i = 0; i < side_; ++i)
      for (int j = 0; j < side_; ++j) r[i][j] = at(i, j).evaluate(assign);
    return r;
  }

  /// Column-normalized matrix with unit diagonal: M~_{ij} = M_{ij}/M_{jj}.
  OpMatrix tilde() const {
    OpMatrix r(n_, side_, tag_);
    for (int j = 0; j < side_; ++j) {
      if (at(j, j).is_zero()) throw Singular("tilde: zero diagonal");
      for (int i = 0; i < side_; ++i) r.at(i, j) = at(i, j) / at(j, j);
    }
    return r;
  }

  /// Antidiagonal conjugation fp * M * fp (reverse rows and columns).
  OpMatrix flip() const {
    OpMatrix r(n_, side_, tag_);
    for (int i = 0; i < side_; ++i)
      for (int j = 0; j < side_; ++j) r.at(i, j) = at(side_ - 1 - i, side_ - 1 - j);
    return r;
  }

 private:
  int n_ = 0;
  int side_ = 0;
  std::string tag_;
  std::vector<FieldElement> e_;
};

} // namespace hilb
