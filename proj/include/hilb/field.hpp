#pragma once
#include "hilb/poly.hpp"
#include <functional>
#include <mutex>
#include <vector>

namespace hilb {

struct EvalPole : std::domain_error {
  explicit EvalPole(const std::string& m) : std::domain_error(m) {}
};

/// Image of a variable under substitution: coeff * monomial.
/// Fractional powers of the coefficient are only defined for Q(i) units
/// via the i^{2e} branch rule.
struct VarImage {
  GaussRational coeff{1};
  std::array<Rational64, NVARS> exps{};  // true (unscaled) exponents

  static VarImage var(int v, Rational64 e = Rational64(1), GaussRational c = GaussRational(1)) {
    VarImage im;
    im.coeff = std::move(c);
    im.exps[v] = e;
    return im;
  }
};

using SubstMap = std::map<int, VarImage>;

/// Registry of small denominator factors seen so far. Every denominator in
/// this problem domain is (up to monomials) a product of a small closed set
/// of atoms (R-matrix pole factors, eigenvalue differences), so peeling
/// composite factors into registered atoms keeps cancellation factor-exact.
class FactorRegistry {
 public:
  static FactorRegistry& instance() {
    static FactorRegistry r;
    return r;
  }

  void offer(const Poly& p) {
    if (p.size() < 2 || p.size() > 24) return;
    std::lock_guard<std::mutex> lk(mu_);
    if (atoms_.size() >= 512) return;
    for (auto& a : atoms_)
      if (a == p) return;
    atoms_.push_back(p);
  }

  std::vector<Poly> snapshot() const {
    std::lock_guard<std::mutex> lk(mu_);
    return atoms_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Poly> atoms_;
};

/// Rational function num / prod(den_factors) over the Laurent ring.
///
/// The denominator is kept as an explicit list of non-constant polynomial
/// factors (each content-stripped with unit leading coefficient), so
/// cancellation is per-factor exact division rather than a multivariate gcd;
/// products and sums preserve the factorization. Equality is decided by
/// cross-multiplication. den() exposes the expanded product.
class FieldElement {
 public:
  FieldElement() : num_() {}
  FieldElement(Poly n, Poly d) : num_(std::move(n)) {
    if (d.is_zero()) throw std::domain_error("FieldElement: zero denominator");
    push_den(std::move(d));
    normalize();
  }
  explicit FieldElement(Poly n) : num_(std::move(n)) { normalize(); }
  explicit FieldElement(long v) : num_(Poly(v)) {}
  explicit FieldElement(GaussRational c) : num_(Poly(std::move(c))) {}

  static FieldElement variable(int v, Rational64 e = Rational64(1)) {
    return FieldElement(Poly::variable(v, e));
  }
  static FieldElement one() { return FieldElement(1); }
  static FieldElement zero() { return FieldElement(0); }

  const Poly& num() const { return num_; }
  const std::vector<Poly>& den_factors() const { return den_; }
  Poly den() const {
    Poly d(1);
    for (auto& f : den_) d *= f;
    return d;
  }
  bool den_trivial() const { return den_.empty(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.empty() ? num_ == Poly(1) : num_ == den(); }

  FieldElement operator-() const {
    FieldElement r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    // split den multisets into common and extra parts
    std::vector<Poly> common, xe = x.den_;
    std::vector<char> used(y.den_.size(), 0);
    std::vector<Poly> ye;
    {
      std::vector<Poly> xrem;
      for (auto& f : xe) {
        bool matched = false;
        for (std::size_t j = 0; j < y.den_.size(); ++j) {
          if (used[j]) continue;
          if (f == y.den_[j]) { used[j] = 1; matched = true; break; }
        }
        if (matched) common.push_back(f);
        else xrem.push_back(f);
      }
      xe = std::move(xrem);
      for (std::size_t j = 0; j < y.den_.size(); ++j)
        if (!used[j]) ye.push_back(y.den_[j]);
    }
    Poly xf(1), yf(1);
    for (auto& f : ye) xf *= f;
    for (auto& f : xe) yf *= f;
    FieldElement r;
    r.num_ = x.num_ * xf + y.num_ * yf;
    r.den_ = std::move(common);
    for (auto& f : xe) r.den_.push_back(f);
    for (auto& f : ye) r.den_.push_back(f);
    r.normalize();
    return r;
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) { return x + (-y); }

  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    if (x.is_zero() || y.is_zero()) return zero();
    FieldElement r;
    r.num_ = x.num_ * y.num_;
    r.den_ = x.den_;
    r.den_.insert(r.den_.end(), y.den_.begin(), y.den_.end());
    r.normalize();
    return r;
  }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    return x * y.inv();
  }
  FieldElement& operator+=(const FieldElement& o) { *this = *this + o; return *this; }
  FieldElement& operator-=(const FieldElement& o) { *this = *this - o; return *this; }
  FieldElement& operator*=(const FieldElement& o) { *this = *this * o; return *this; }
  FieldElement& operator/=(const FieldElement& o) { *this = *this / o; return *this; }

  FieldElement inv() const {
    if (is_zero()) throw std::domain_error("FieldElement: inverse of zero");
    FieldElement r;
    r.num_ = Poly(1);
    for (auto& f : den_) r.num_ *= f;
    r.push_den(num_);
    r.normalize();
    return r;
  }

  FieldElement pow_int(long k) const {
    if (k == 0) return one();
    FieldElement b = k > 0 ? *this : inv();
    if (k < 0) k = -k;
    FieldElement acc = one();
    while (k) {
      if (k & 1) acc *= b;
      b *= b;
      k >>= 1;
    }
    return acc;
  }

  /// Exact equality via cross-multiplication.
  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    return (x.num_ * y.den()) == (y.num_ * x.den());
  }
  friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

  bool is_laurent_polynomial() const {
    if (den_.empty()) return true;
    return poly_exact_div(num_, den()).has_value();
  }

  /// True if the element is a Laurent polynomial depending only on `vars`.
  bool is_laurent_polynomial_in(std::initializer_list<int> vars) const {
    Poly n = num_;
    if (!den_.empty()) {
      auto q = poly_exact_div(num_, den());
      if (!q) return false;
      n = std::move(*q);
    }
    for (int v = 0; v < NVARS; ++v) {
      bool allowed = false;
      for (int w : vars) allowed |= (w == v);
      if (!allowed && n.depends_on(v)) return false;
    }
    return true;
  }

  bool depends_on(int var) const {
    if (num_.depends_on(var)) return true;
    for (auto& f : den_)
      if (f.depends_on(var)) return true;
    return false;
  }

  FieldElement substitute(const SubstMap& map) const {
    FieldElement r;
    r.num_ = subst_poly(num_, map);
    for (auto& f : den_) r.push_den(subst_poly(f, map));
    r.normalize();
    return r;
  }

  /// lim var->0; nullopt when the limit is a pole.
  std::optional<FieldElement> limit_var0(int var) const {
    if (num_.is_zero()) return zero();
    Poly n = num_;
    Poly d = den();
    Poly::unify(n, d);
    auto on = n.min_exp(var), od = d.min_exp(var);
    if (on > od) return zero();
    if (on < od) return std::nullopt;
    return FieldElement(n.coeff_at(var, on), d.coeff_at(var, od));
  }

  std::complex<double> evaluate(const std::array<std::complex<double>, NVARS>& assign) const {
    std::complex<double> d = 1.0;
    for (auto& f : den_) {
      auto v = f.evaluate(assign);
      if (std::abs(v) <= 1e-13) throw EvalPole("denominator vanishes at evaluation point");
      d *= v;
    }
    return num_.evaluate(assign) / d;
  }

  /// The unique monomial value if this element is a pure term, else nullopt.
  std::optional<std::pair<GaussRational, Monomial>> as_monomial() const {
    if (!den_.empty() || num_.size() != 1) return std::nullopt;
    auto& [m, c] = *num_.terms().begin();
    return std::make_pair(c, m);
  }

 private:
  // push a denominator polynomial, folding units/monomials into the numerator
  void push_den(Poly d) {
    if (d.is_zero()) throw std::domain_error("FieldElement: zero denominator");
    if (d.is_monomial()) {
      auto& [m, c] = d.leading();
      num_.shift_by(Monomial{} - m);
      num_.scale(GaussRational(1) / c);
      num_.minimize_lattice();
      return;
    }
    // content-strip and make monic; the scalar/monomial moves to the numerator
    Monomial ct = d.content();
    if (!ct.is_zero()) {
      d.shift_by(Monomial{} - ct);
      num_.shift_by(Monomial{} - ct);
      num_.minimize_lattice();
      d.minimize_lattice();
    }
    GaussRational lc = d.leading().second;
    if (!lc.is_one()) {
      GaussRational il = GaussRational(1) / lc;
      d.scale(il);
      num_.scale(il);
    }
    den_.push_back(std::move(d));
  }

  void normalize() {
    if (num_.is_zero()) { den_.clear(); return; }
    if (den_.empty()) { num_.minimize_lattice(); return; }
    // split composite factors along registered atoms for finer cancellation
    {
      auto atoms = FactorRegistry::instance().snapshot();
      std::vector<Poly> fine;
      for (auto& f : den_) {
        Poly rest = f;
        if (rest.size() > 3) {
          for (auto& a : atoms) {
            if (a == rest) break;
            while (rest.size() >= a.size() && rest.size() > 1) {
              auto q = poly_exact_div(rest, a, 16 + 2 * rest.size());
              if (!q) break;
              rest = std::move(*q);
              fine.push_back(a);
            }
          }
        }
        if (!rest.is_constant() || !rest.constant_value().is_one()) {
          // rest may be a unit/monomial after peeling
          if (rest.is_monomial()) {
            auto& [m, c] = rest.leading();
            num_.shift_by(Monomial{} - m);
            num_.scale(GaussRational(1) / c);
          } else {
            fine.push_back(std::move(rest));
          }
        }
      }
      den_ = std::move(fine);
    }
    // cancel factors dividing the numerator
    std::vector<Poly> keep;
    for (auto& f : den_) {
      if (!num_.is_zero() && num_.size() >= 1) {
        auto q = poly_exact_div(num_, f, 64 + 2 * num_.size());
        if (q) {
          num_ = std::move(*q);
          continue;
        }
      }
      keep.push_back(std::move(f));
    }
    den_ = std::move(keep);
    // re-normalize factor forms (content/monic) and register them
    std::vector<Poly> fixed;
    for (auto& f : den_) {
      Poly d = std::move(f);
      Monomial ct = d.content();
      if (!ct.is_zero()) {
        d.shift_by(Monomial{} - ct);
        num_.shift_by(Monomial{} - ct);
        d.minimize_lattice();
      }
      GaussRational lc = d.leading().second;
      if (!lc.is_one()) {
        GaussRational il = GaussRational(1) / lc;
        d.scale(il);
        num_.scale(il);
      }
      FactorRegistry::instance().offer(d);
      fixed.push_back(std::move(d));
    }
    den_ = std::move(fixed);
    num_.minimize_lattice();
    // deterministic factor order
    std::sort(den_.begin(), den_.end(), [](const Poly& a, const Poly& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      GradedLex less;
      Poly aa = a, bb = b;
      Poly::unify(aa, bb);
      auto ia = aa.terms().rbegin(), ib = bb.terms().rbegin();
      for (; ia != aa.terms().rend() && ib != bb.terms().rend(); ++ia, ++ib) {
        if (less(ia->first, ib->first)) return true;
        if (less(ib->first, ia->first)) return false;
      }
      return false;
    });
  }

  static Poly subst_poly(const Poly& p, const SubstMap& map) {
    long lat = p.lattice();
    for (auto& [v, im] : map) {
      if (!p.depends_on(v)) continue;
      for (int t = 0; t < NVARS; ++t)
        if (im.exps[t].num != 0) lat = std::lcm(lat, (long)(im.exps[t].den) * p.lattice());
    }
    if (lat > max_lattice()) throw LatticeOverflow("substitute: lattice " + std::to_string(lat));
    Poly::TermMap out;
    for (auto& [m, c] : p.terms()) {
      GaussRational coeff = c;
      Monomial mm;  // scaled by lat
      long f = lat / p.lattice();
      for (int v = 0; v < NVARS; ++v) {
        if (m.e[v] == 0) continue;
        auto it = map.find(v);
        if (it == map.end()) {
          mm.e[v] += m.e[v] * f;
          continue;
        }
        const VarImage& im = it->second;
        Rational64 ev(m.e[v], p.lattice());
        for (int t = 0; t < NVARS; ++t) {
          if (im.exps[t].num == 0) continue;
          Rational64 te = ev * im.exps[t];
          if (((long long)te.num * lat) % te.den != 0)
            throw LatticeOverflow("substitute: exponent does not fit lattice");
          mm.e[t] += (long long)te.num * lat / te.den;
        }
        if (!im.coeff.is_one()) {
          if (ev.is_integer()) {
            coeff *= im.coeff.pow_int(ev.num);
          } else if (ev.den == 2) {
            GaussRational c2 = im.coeff;
            if (c2 == GaussRational(Rat(-1))) coeff = coeff.mul_i_pow(ev.num);
            else if (c2.is_one()) { /* nothing */ }
            else throw std::domain_error("substitute: fractional power of non-unit scalar");
          } else {
            throw std::domain_error("substitute: fractional power of scalar beyond half-integers");
          }
        }
      }
      if (coeff.is_zero()) continue;
      auto it = out.find(mm);
      if (it == out.end()) out.emplace(std::move(mm), std::move(coeff));
      else {
        it->second += coeff;
        if (it->second.is_zero()) out.erase(it);
      }
    }
    return Poly::from_terms(std::move(out), lat);
  }

  Poly num_;
  std::vector<Poly> den_;
};

inline FieldElement fe_var(int v, Rational64 e = Rational64(1)) { return FieldElement::variable(v, e); }
inline FieldElement fe_int(long v) { return FieldElement(v); }
inline FieldElement fe_rat(const Rat& r) { return FieldElement(GaussRational(r)); }

/// (-1)^e * x^e with the frozen branch (-x)^e := i^{2e} x^e; 2e must be integral.
inline FieldElement neg_power(int var, Rational64 e) {
  Rational64 two_e = e * Rational64(2);
  if (!two_e.is_integer()) throw std::domain_error("neg_power: branch needs half-integer exponent");
  FieldElement m = fe_var(var, e);
  GaussRational c = GaussRational(1).mul_i_pow(two_e.num);
  return FieldElement(c) * m;
}

} // namespace hilb
