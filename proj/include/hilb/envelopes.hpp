#pragma once
#include "hilb/json_io.hpp"
#include "hilb/parser.hpp"
#include "hilb/symfun.hpp"
#include <cstdlib>
#include <fstream>
#include <mutex>

namespace hilb {

struct UnsupportedN : std::domain_error {
  explicit UnsupportedN(const std::string& m) : std::domain_error(m) {}
};

struct StabKey {
  int n = 2;
  Wall w{0};
  int side = +1;     // +1: slope w+eps, -1: slope w-eps
  int chamber = +1;  // +1: sigma (upper triangular U), -1: -sigma (lower L)
  bool targetY = false;
};

/// kappa*: a -> z h, h -> 1/h, z -> a h (3D-mirror change of variables).
inline const SubstMap& kappa_map() {
  static const SubstMap m = [] {
    SubstMap s;
    VarImage ka;
    ka.exps[VZ] = Rational64(1);
    ka.exps[VH] = Rational64(1);
    s[VA] = ka;
    s[VH] = VarImage::var(VH, Rational64(-1));
    VarImage kz;
    kz.exps[VA] = Rational64(1);
    kz.exps[VH] = Rational64(1);
    s[VZ] = kz;
    return s;
  }();
  return m;
}

inline const SubstMap& inva_map() {
  static const SubstMap m = [] {
    SubstMap s;
    s[VA] = VarImage::var(VA, Rational64(-1));
    return s;
  }();
  return m;
}

inline OpMatrix subst_a_inverse(const OpMatrix& m) { return m.substitute(inva_map()); }
inline OpMatrix subst_kappa(const OpMatrix& m) { return m.substitute(kappa_map()); }

/// L^side_w = fp U^side_w(a^{-1}) fp (both for X and for Y_w).
inline OpMatrix L_from_U(const OpMatrix& U) {
  return subst_a_inverse(U).flip();
}

/// Appendix-derived stable envelope data for one n.
class EnvelopeData {
 public:
  static const EnvelopeData& get(int n) {
    static std::mutex mu;
    static std::map<int, EnvelopeData> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, EnvelopeData(n)).first;
    return it->second;
  }

  static std::string data_dir() {
    if (const char* env = std::getenv("HILB_DATA_DIR")) return env;
#ifdef HILB_DEFAULT_DATA_DIR
    return HILB_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
  }

  int n() const { return n_; }
  const std::vector<Wall>& fundamental_walls() const { return walls_; }

  /// U on the open slope interval (walls_[i], walls_[i+1]).
  const OpMatrix& interval_matrix(std::size_t i) const { return umats_.at(i); }

  /// Y_w stable envelope by denominator; side +1/-1.
  const OpMatrix& y_matrix(long den, int side) const {
    auto it = ymats_.find(den);
    if (it == ymats_.end()) throw UnsupportedN("no Y data for denominator " + std::to_string(den));
    return side > 0 ? it->second.first : it->second.second;
  }
  bool has_y(long den) const { return ymats_.count(den) > 0; }

 private:
  explicit EnvelopeData(int n) : n_(n) {
    if (n != 2 && n != 3) throw UnsupportedN("stable envelope data available for n in {2,3}");
    load_x();
    load_y();
  }

  static Json read_json(const std::string& fname) {
    std::ifstream in(data_dir() + "/" + fname);
    if (!in) throw std::runtime_error("cannot open fixture " + fname +
                                      " (set HILB_DATA_DIR to the data directory)");
    Json j;
    in >> j;
    return j;
  }

  OpMatrix parse_matrix(const Json& rows, bool flip) const {
    int s = int(rows.size());
    OpMatrix m(n_, s, "domdec");
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        m.at(i, j) = fe_parse(rows.at(i).at(j).get<std::string>());
    return flip ? m.flip() : m;
  }

  void load_x() {
    Json j = read_json("stab_x_n" + std::to_string(n_) + ".json");
    bool flip = j.at("flip").get<bool>();
    for (auto& iv : j.at("intervals")) {
      walls_.push_back(Wall::parse(iv.at("above_wall").get<std::string>()));
      umats_.push_back(parse_matrix(iv.at("matrix"), flip));
    }
  }

  void load_y() {
    Json j = read_json("stab_y_n" + std::to_string(n_) + ".json");
    bool flip = j.at("flip").get<bool>();
    for (auto& d : j.at("denominators")) {
      long den = d.at("den").get<long>();
      ymats_.emplace(den, std::make_pair(parse_matrix(d.at("plus"), flip),
                                         parse_matrix(d.at("minus"), flip)));
    }
  }

  int n_;
  std::vector<Wall> walls_;          // fundamental walls in [0,1), ascending, starting at 0
  std::vector<OpMatrix> umats_;      // U on (walls_[i], next wall)
  std::map<long, std::pair<OpMatrix, OpMatrix>> ymats_;  // den -> (U+_Y, U-_Y)
};

/// K-theoretic stable envelope matrix of X at slope w +/- eps.
/// Integral shifts act by conjugation with O(1) = E0.
inline OpMatrix stab_X_U(int n, Wall w, int side) {
  const auto& data = EnvelopeData::get(n);
  const auto& walls = data.fundamental_walls();
  long k = w.floor();
  Wall wf = w - Rational64(k);
  std::size_t idx = 0;
  bool at_wall = false;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (walls[i] == wf) { idx = i; at_wall = true; break; }
    if (walls[i] < wf) idx = i;
  }
  OpMatrix base = [&] {
    if (at_wall) {
      if (side > 0) return data.interval_matrix(idx);
      // below an integer wall the jump is trivial: U^-_k = U^+_k
      return data.interval_matrix(idx == 0 ? 0 : idx - 1);
    }
    return data.interval_matrix(idx);
  }();
  if (k == 0) return base;
  OpMatrix O = e0_matrix(n);
  OpMatrix Ok = OpMatrix::identity(n, O.side());
  OpMatrix Ostep = k > 0 ? O : O.inverse();
  for (long i = 0; i < std::labs(k); ++i) Ok = Ok * Ostep;
  return Ok * base * Ok.inverse();
}

/// Stable envelope per spec key; chamber -sigma gives the L-matrices.
inline OpMatrix stab(const StabKey& key) {
  if (key.targetY) {
    const auto& data = EnvelopeData::get(key.n);
    long den = key.w.den;
    OpMatrix U = data.has_y(den)
                     ? data.y_matrix(den, key.side)
                     : OpMatrix::identity(key.n, int(partitions_of(key.n).size()));
    return key.chamber > 0 ? U : L_from_U(U);
  }
  OpMatrix U = stab_X_U(key.n, key.w, key.side);
  return key.chamber > 0 ? U : L_from_U(U);
}

/// Diagonal gamma_w twist. Branch: per-partition total exponents,
/// (-x)^E := i^{2E} x^E; requires 2*w*sum(contents) integral.
inline OpMatrix gamma_w(int n, Wall w) {
  auto parts = partitions_of(n);
  std::vector<FieldElement> d;
  for (auto& lam : parts) {
    Rational64 Ea = w * Rational64(content_sum(lam));
    Rational64 twoEa = Ea * Rational64(2);
    if (!twoEa.is_integer())
      throw LatticeOverflow("gamma_w: (-a) exponent " + Ea.str() + " leaves Q(i)");
    long twoEh = 0;  // E_h = sum floor(w*hook) + n/2, track 2*E_h
    for (auto& b : boxes(lam)) twoEh += 2 * (w * Rational64(b.hook)).floor() + 1;
    FieldElement entry = fe_var(VA, Ea) * fe_var(VH, Rational64(-twoEh, 2));
    GaussRational unit = GaussRational(1).mul_i_pow(twoEa.num + twoEh);
    d.push_back(FieldElement(unit) * entry);
  }
  auto m = OpMatrix::diagonal(n, std::move(d));
  m.set_order_tag("domdec");
  return m;
}

/// hbar^{Omega_w} = (-h)^{n - codim_X(Y_w)/2} per fixed point.
inline OpMatrix hbar_omega(int n, Wall w) {
  auto parts = partitions_of(n);
  std::vector<FieldElement> d;
  for (auto& lam : parts) {
    long e = n - codim_Y(lam, w) / 2;
    FieldElement v = fe_var(VH, Rational64(e));
    if (e % 2) v = -v;
    d.push_back(v);
  }
  auto m = OpMatrix::diagonal(n, std::move(d));
  m.set_order_tag("domdec");
  return m;
}

/// Diagonal D_w of the monodromy Gauss decomposition, in the normalization
/// verified against the appendix data:
///   D_w = (-1)^n diag prod_boxes hbar^{-ceil(hook*w)}.
/// (The printed Eq. (Ddef) uses floors and a different hbar power; for
/// non-wall slopes the two differ by the exact hbar^{-n} this form absorbs.)
inline OpMatrix d_matrix(int n, Wall w) {
  auto parts = partitions_of(n);
  std::vector<FieldElement> d;
  for (auto& lam : parts) {
    long e = 0;
    for (auto& b : boxes(lam)) e -= (w * Rational64(b.hook)).ceil();
    FieldElement v = fe_var(VH, Rational64(2 * e));
    if (n % 2) v = -v;
    d.push_back(v);
  }
  auto m = OpMatrix::diagonal(n, std::move(d));
  m.set_order_tag("domdec");
  return m;
}

/// Total R-matrix of Y_w: R^side = U^side_Y (L^side_Y)^{-1}; identity when
/// Y_w is a union of points (denominator > n).
inline OpMatrix r_total_Y(int n, Wall w, int side) {
  const auto& data = EnvelopeData::get(n);
  if (!data.has_y(w.den)) return OpMatrix::identity(n, int(partitions_of(n).size()));
  const OpMatrix& U = data.y_matrix(w.den, side);
  return U * L_from_U(U).inverse();
}

/// Twisted R-matrix: gamma_w kappa*(R^side_{Y_w}(a)) gamma_w^{-1}.
inline OpMatrix r_twisted(int n, Wall w, int side) {
  OpMatrix g = gamma_w(n, w);
  return g * subst_kappa(r_total_Y(n, w, side)) * g.inverse();
}

/// Wall R-matrices of X across slope w.
inline OpMatrix r_wall_X(int n, Wall w, int chamber) {
  OpMatrix minus = stab_X_U(n, w, -1);
  OpMatrix plus = stab_X_U(n, w, +1);
  if (chamber > 0) return minus * plus.inverse();
  return L_from_U(minus) * L_from_U(plus).inverse();
}

} // namespace hilb
