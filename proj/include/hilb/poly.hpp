#pragma once
#include "hilb/rational.hpp"
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace hilb {

// Variable universe is fixed: a, h, z, q, eps1, eps2.
inline constexpr int NVARS = 6;
enum Var : int { VA = 0, VH = 1, VZ = 2, VQ = 3, VE1 = 4, VE2 = 5 };
inline const std::array<const char*, NVARS> kVarNames = {"a", "h", "z", "q", "eps1", "eps2"};

inline int var_index(const std::string& name) {
  for (int i = 0; i < NVARS; ++i)
    if (name == kVarNames[i]) return i;
  if (name == "e1") return VE1;
  if (name == "e2") return VE2;
  throw std::domain_error("unknown variable: " + name);
}

struct LatticeOverflow : std::domain_error {
  explicit LatticeOverflow(const std::string& m) : std::domain_error(m) {}
};

inline long& max_lattice() {
  static long v = 120;  // 2*lcm(1..6) covers wall shifts and sqrt exponents at desk scale
  return v;
}

/// Exponent vector scaled by the owning polynomial's lattice denominator.
struct Monomial {
  std::array<std::int64_t, NVARS> e{};

  bool operator==(const Monomial& o) const { return e == o.e; }
  std::int64_t degree() const { return std::accumulate(e.begin(), e.end(), std::int64_t(0)); }

  Monomial operator+(const Monomial& o) const {
    Monomial r;
    for (int i = 0; i < NVARS; ++i) r.e[i] = e[i] + o.e[i];
    return r;
  }
  Monomial operator-(const Monomial& o) const {
    Monomial r;
    for (int i = 0; i < NVARS; ++i) r.e[i] = e[i] - o.e[i];
    return r;
  }
  bool is_zero() const {
    for (auto x : e) if (x != 0) return false;
    return true;
  }
};

/// Graded lexicographic order on (a,h,z,q,eps1,eps2); fixes normal forms.
struct GradedLex {
  bool operator()(const Monomial& x, const Monomial& y) const {
    auto dx = x.degree(), dy = y.degree();
    if (dx != dy) return dx < dy;
    for (int i = 0; i < NVARS; ++i)
      if (x.e[i] != y.e[i]) return x.e[i] < y.e[i];
    return false;
  }
};

/// Sparse Laurent polynomial over Q(i) with exponents in (1/lattice)*Z.
class Poly {
 public:
  using TermMap = std::map<Monomial, GaussRational, GradedLex>;

  Poly() = default;
  explicit Poly(GaussRational c) { if (!c.is_zero()) terms_[Monomial{}] = std::move(c); }
  explicit Poly(long v) : Poly(GaussRational(v)) {}

  static Poly variable(int var, Rational64 exp = Rational64(1)) {
    Poly p;
    p.lat_ = exp.den;
    Monomial m;
    m.e[var] = exp.num;
    p.terms_[m] = GaussRational(1);
    p.minimize_lattice();
    return p;
  }

  static Poly term(GaussRational c, const Monomial& m, long lattice) {
    Poly p;
    p.lat_ = lattice;
    if (!c.is_zero()) p.terms_[m] = std::move(c);
    p.minimize_lattice();
    return p;
  }

  static Poly from_terms(TermMap t, long lattice) {
    Poly p;
    p.lat_ = lattice;
    p.terms_ = std::move(t);
    p.minimize_lattice();
    return p;
  }

  long lattice() const { return lat_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_zero()); }
  std::size_t size() const { return terms_.size(); }

  GaussRational constant_value() const {
    if (terms_.empty()) return GaussRational(0);
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? GaussRational(0) : it->second;
  }

  const std::pair<const Monomial, GaussRational>& leading() const {
    return *terms_.rbegin();
  }

  void rescale_to(long lattice) {
    if (lattice == lat_) return;
    if (lattice % lat_ != 0) throw std::logic_error("rescale_to: not a refinement");
    if (lattice > max_lattice()) throw LatticeOverflow("lattice " + std::to_string(lattice));
    long f = lattice / lat_;
    TermMap nt;
    for (auto& [m, c] : terms_) {
      Monomial mm;
      for (int i = 0; i < NVARS; ++i) mm.e[i] = m.e[i] * f;
      nt.emplace(mm, c);
    }
    terms_ = std::move(nt);
    lat_ = lattice;
  }

  void minimize_lattice() {
    if (lat_ == 1) return;
    std::int64_t g = lat_;
    for (auto& [m, c] : terms_)
      for (auto x : m.e) g = std::gcd(g, x < 0 ? -x : x);
    if (g <= 1) return;
    TermMap nt;
    for (auto& [m, c] : terms_) {
      Monomial mm;
      for (int i = 0; i < NVARS; ++i) mm.e[i] = m.e[i] / g;
      nt.emplace(mm, c);
    }
    terms_ = std::move(nt);
    lat_ /= g;
  }

  static long unify(Poly& x, Poly& y) {
    long l = std::lcm(x.lat_, y.lat_);
    x.rescale_to(l);
    y.rescale_to(l);
    return l;
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  friend Poly operator+(Poly x, Poly y) {
    unify(x, y);
    for (auto& [m, c] : y.terms_) {
      auto it = x.terms_.find(m);
      if (it == x.terms_.end()) x.terms_.emplace(m, std::move(c));
      else {
        it->second += c;
        if (it->second.is_zero()) x.terms_.erase(it);
      }
    }
    x.minimize_lattice();
    return x;
  }
  friend Poly operator-(Poly x, const Poly& y) { return std::move(x) + (-y); }

  friend Poly operator*(Poly x, Poly y) {
    unify(x, y);
    Poly r;
    r.lat_ = x.lat_;
    for (auto& [mx, cx] : x.terms_)
      for (auto& [my, cy] : y.terms_) {
        GaussRational c = cx * cy;
        Monomial m = mx + my;
        auto it = r.terms_.find(m);
        if (it == r.terms_.end()) r.terms_.emplace(std::move(m), std::move(c));
        else {
          it->second += c;
          if (it->second.is_zero()) r.terms_.erase(it);
        }
      }
    r.minimize_lattice();
    return r;
  }

  Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
  Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
  Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

  void scale(const GaussRational& c) {
    if (c.is_zero()) { terms_.clear(); return; }
    for (auto& [m, v] : terms_) v *= c;
  }

  friend bool operator==(const Poly& x, const Poly& y) {
    Poly a = x, b = y;
    unify(a, b);
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Poly& x, const Poly& y) { return !(x == y); }

  /// Per-variable minimum exponent over all terms (scaled); 0 for absent vars.
  Monomial content() const {
    Monomial m;
    bool first = true;
    for (auto& [mm, c] : terms_) {
      if (first) { m = mm; first = false; continue; }
      for (int i = 0; i < NVARS; ++i) m.e[i] = std::min(m.e[i], mm.e[i]);
    }
    return m;
  }

  void shift_by(const Monomial& m) {
    TermMap nt;
    for (auto& [mm, c] : terms_) nt.emplace(mm + m, c);
    terms_ = std::move(nt);
  }

  /// Lowest exponent of `var` (scaled by lattice); 0 if the poly is zero.
  std::int64_t min_exp(int var) const {
    if (terms_.empty()) return 0;
    std::int64_t m = terms_.begin()->first.e[var];
    for (auto& [mm, c] : terms_) m = std::min(m, mm.e[var]);
    return m;
  }
  std::int64_t max_exp(int var) const {
    if (terms_.empty()) return 0;
    std::int64_t m = terms_.begin()->first.e[var];
    for (auto& [mm, c] : terms_) m = std::max(m, mm.e[var]);
    return m;
  }
  bool depends_on(int var) const {
    for (auto& [m, c] : terms_) if (m.e[var] != 0) return true;
    return false;
  }

  /// Terms whose `var`-exponent (scaled) equals `exp`, with that power removed.
  Poly coeff_at(int var, std::int64_t exp) const {
    Poly r;
    r.lat_ = lat_;
    for (auto& [m, c] : terms_)
      if (m.e[var] == exp) {
        Monomial mm = m;
        mm.e[var] = 0;
        r.terms_.emplace(mm, c);
      }
    r.minimize_lattice();
    return r;
  }

  std::complex<double> evaluate(const std::array<std::complex<double>, NVARS>& assign) const {
    std::complex<double> s = 0;
    for (auto& [m, c] : terms_) {
      std::complex<double> t = c.to_complex();
      for (int i = 0; i < NVARS; ++i) {
        if (m.e[i] == 0) continue;
        double ex = double(m.e[i]) / double(lat_);
        // principal branch for fractional powers
        t *= std::exp(ex * std::log(assign[i]));
      }
      s += t;
    }
    return s;
  }

 private:
  long lat_ = 1;
  TermMap terms_;
};

/// Exact quotient p/d as a Laurent polynomial, or nullopt.
/// Leading-term reduction in graded lex order after stripping contents.
/// max_steps = 0 means unbounded (the exact operation); a positive cap makes
/// this usable as an opportunistic simplifier that may give up early.
inline std::optional<Poly> poly_exact_div(const Poly& p, const Poly& d, std::size_t max_steps = 0) {
  if (d.is_zero()) throw std::domain_error("poly_exact_div: zero divisor");
  if (p.is_zero()) return Poly();
  Poly r = p, dd = d;
  Poly::unify(r, dd);
  Monomial cr = r.content(), cd = dd.content();
  r.shift_by(Monomial{} - cr);
  dd.shift_by(Monomial{} - cd);
  long lat = r.lattice();
  // quick rejection: exponent spans must nest
  for (int v = 0; v < NVARS; ++v)
    if (r.max_exp(v) < dd.max_exp(v)) return std::nullopt;
  const auto& [ltd_m, ltd_c] = dd.leading();
  Monomial ltdm = ltd_m;
  GaussRational ltdc = ltd_c;
  // in-place leading-term reduction on a working term map
  Poly::TermMap work(r.terms());
  Poly::TermMap quot;
  std::size_t steps = 0;
  while (!work.empty()) {
    if (max_steps && ++steps > max_steps) return std::nullopt;
    auto lead = std::prev(work.end());
    Monomial qm = lead->first - ltdm;
    for (int i = 0; i < NVARS; ++i)
      if (qm.e[i] < 0) return std::nullopt;  // quotient left the polynomial cone
    GaussRational qc = lead->second / ltdc;
    quot.emplace(qm, qc);
    for (auto& [md, cd2] : dd.terms()) {
      Monomial mm = qm + md;
      GaussRational delta = qc * cd2;
      auto it = work.find(mm);
      if (it == work.end()) {
        delta = -delta;
        if (!delta.is_zero()) work.emplace(std::move(mm), std::move(delta));
      } else {
        it->second -= delta;
        if (it->second.is_zero()) work.erase(it);
      }
    }
  }
  Monomial shift = cr - cd;
  Poly::TermMap shifted;
  for (auto& [m, c] : quot) shifted.emplace(m + shift, c);
  return Poly::from_terms(std::move(shifted), lat);
}

} // namespace hilb
