#pragma once
#include "hilb/matrix.hpp"
#include "hilb/partitions.hpp"
#include <numeric>

namespace hilb {

/// Element of the Fock space in power-sum coordinates: sum over partitions
/// mu of coeff * p_mu (degrees may mix during intermediate computations).
using FockVector = std::map<Partition, FieldElement>;

inline void fock_add(FockVector& v, const Partition& mu, const FieldElement& c) {
  if (c.is_zero()) return;
  auto it = v.find(mu);
  if (it == v.end()) v.emplace(mu, c);
  else {
    it->second += c;
    if (it->second.is_zero()) v.erase(it);
  }
}

inline FockVector fock_scale(const FockVector& v, const FieldElement& c) {
  FockVector r;
  for (auto& [mu, x] : v) fock_add(r, mu, x * c);
  return r;
}

inline Partition remove_part(const Partition& mu, int k) {
  Partition r = mu;
  auto it = std::find(r.parts.begin(), r.parts.end(), k);
  if (it == r.parts.end()) throw std::domain_error("remove_part: missing part");
  r.parts.erase(it);
  return r;
}

inline Partition add_part(const Partition& mu, int k) {
  Partition r = mu;
  r.parts.push_back(k);
  std::sort(r.parts.begin(), r.parts.end(), std::greater<int>());
  return r;
}

/// Cohomological Heisenberg action (k != 0):
///   alpha_k = -k d/dp_k for k > 0,  alpha_{-k} = -p_k for k > 0.
inline FockVector alpha_coh(int k, const FockVector& v) {
  if (k == 0) throw std::domain_error("alpha_coh: k = 0");
  FockVector r;
  for (auto& [mu, c] : v) {
    if (k > 0) {
      int m = mu.mult(k);
      if (m == 0) continue;
      fock_add(r, remove_part(mu, k), c * fe_int(-long(k) * m));
    } else {
      fock_add(r, add_part(mu, -k), -c);
    }
  }
  return r;
}

/// Denominator of the slope-0 K-theoretic action:
/// D_k = (t1^{k/2}-t1^{-k/2})(t2^{k/2}-t2^{-k/2}) with t1 = a h, t2 = h/a.
inline FieldElement slope0_denominator(int k) {
  Rational64 kh(k, 2);
  FieldElement t1p = fe_var(VA, kh) * fe_var(VH, kh);
  FieldElement t2p = fe_var(VA, -kh) * fe_var(VH, kh);
  return (t1p - t1p.inv()) * (t2p - t2p.inv());
}

/// Slope-0 K-theoretic Heisenberg action.
inline FockVector alpha_k0(int m, const FockVector& v) {
  if (m == 0) throw std::domain_error("alpha_k0: m = 0");
  if (m > 0) return alpha_coh(m, v);
  int k = -m;
  FockVector r;
  FieldElement d = slope0_denominator(k).inv();
  for (auto& [mu, c] : v)
    fock_add(r, add_part(mu, k), -(c * d));
  return r;
}

/// r^{(0)}_k = [alpha^0_k, alpha^0_{-k}] = k / D_k.
inline FieldElement slope0_r(int k) {
  return fe_int(k) / slope0_denominator(k);
}

// ----------------------------------------------------------------------
// power sums <-> monomial symmetric functions (exact, small degrees)

namespace detail {

/// p_mu expanded in the m-basis of degree n: row vector over partitions.
/// Computed by explicit expansion in n variables over Q.
inline std::map<Partition, Rat> p_in_m(const Partition& mu, int n) {
  int N = std::max(n, 1);
  using Expo = std::vector<int>;
  std::map<Expo, Rat> poly;  // exponent vector -> coefficient
  poly[Expo(N, 0)] = 1;
  for (int part : mu.parts) {
    std::map<Expo, Rat> next;
    for (auto& [e, c] : poly)
      for (int i = 0; i < N; ++i) {
        Expo e2 = e;
        e2[i] += part;
        next[e2] += c;
      }
    poly = std::move(next);
  }
  std::map<Partition, Rat> out;
  for (auto& [e, c] : poly) {
    Expo s = e;
    std::sort(s.begin(), s.end(), std::greater<int>());
    if (s != e) continue;  // keep only the dominant representative of each orbit
    std::vector<int> parts;
    for (int x : s)
      if (x > 0) parts.push_back(x);
    out[Partition(parts)] = c;
  }
  return out;
}

} // namespace detail

/// m_lambda in p-coordinates for all partitions of n (exact rational data).
inline std::map<Partition, std::map<Partition, Rat>> monomial_in_p(int n) {
  auto parts = partitions_of(n);
  int s = int(parts.size());
  // R[mu][lambda] with p_mu = sum_lambda R m_lambda
  std::vector<std::vector<Rat>> R(s, std::vector<Rat>(s, Rat(0)));
  for (int i = 0; i < s; ++i) {
    auto row = detail::p_in_m(parts[i], n);
    for (auto& [lam, c] : row) R[i][partition_index(parts, lam)] = c;
  }
  // invert R over Q (Gauss-Jordan)
  std::vector<std::vector<Rat>> I(s, std::vector<Rat>(s, Rat(0)));
  for (int i = 0; i < s; ++i) I[i][i] = 1;
  for (int k = 0; k < s; ++k) {
    int piv = -1;
    for (int i = k; i < s; ++i)
      if (R[i][k] != 0) { piv = i; break; }
    if (piv < 0) throw std::logic_error("monomial_in_p: singular transition");
    std::swap(R[piv], R[k]);
    std::swap(I[piv], I[k]);
    Rat d = R[k][k];
    for (int j = 0; j < s; ++j) { R[k][j] /= d; I[k][j] /= d; }
    for (int i = 0; i < s; ++i) {
      if (i == k || R[i][k] == 0) continue;
      Rat f = R[i][k];
      for (int j = 0; j < s; ++j) { R[i][j] -= f * R[k][j]; I[i][j] -= f * I[k][j]; }
    }
  }
  // m_lambda = sum_mu Inv[lambda][mu] p_mu ; Inv = R^{-1} transposed indexing:
  // p = R m  =>  m = R^{-1} p, row lambda of R^{-1} gives p-coords of m_lambda.
  std::map<Partition, std::map<Partition, Rat>> out;
  for (int l = 0; l < s; ++l) {
    std::map<Partition, Rat> row;
    for (int m = 0; m < s; ++m)
      if (I[l][m] != 0) row[parts[m]] = I[l][m];
    out[parts[l]] = std::move(row);
  }
  return out;
}

// ----------------------------------------------------------------------
// Gram-Schmidt engines

/// Deformed power-sum pairing: <p_lambda, p_mu> = delta * z_lambda * w(lambda).
using PairingWeight = std::function<FieldElement(const Partition&)>;

inline FieldElement fock_pairing(const FockVector& u, const FockVector& v, const PairingWeight& w) {
  FieldElement s = FieldElement::zero();
  for (auto& [mu, cu] : u) {
    auto it = v.find(mu);
    if (it == v.end()) continue;
    s += cu * it->second * fe_rat(mu.z_factor()) * w(mu);
  }
  return s;
}

/// Clear denominators (projection directions are scale invariant).
inline FockVector fock_clear_denominators(const FockVector& v) {
  FieldElement scale = FieldElement::one();
  for (auto& [mu, c] : v)
    if (!c.den().is_constant()) scale *= FieldElement(c.den());
  if (scale.is_one()) return v;
  return fock_scale(v, scale);
}

/// Monic (in m_lambda) orthogonal basis via Gram-Schmidt in increasing
/// dominance order; returns vectors in p-coordinates, keyed by partition.
inline std::map<Partition, FockVector> gram_schmidt_basis(int n, const PairingWeight& w) {
  auto parts = partitions_of(n);
  auto m_in_p = monomial_in_p(n);
  std::map<Partition, FockVector> out;
  std::vector<std::pair<Partition, FockVector>> proj;  // denominator-cleared copies
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {  // increasing dominance
    const Partition& lam = *it;
    FockVector v;
    for (auto& [mu, c] : m_in_p[lam]) fock_add(v, mu, fe_rat(c));
    for (auto& [prev, pv] : proj) {
      FieldElement coef = fock_pairing(v, pv, w) / fock_pairing(pv, pv, w);
      if (coef.is_zero()) continue;
      for (auto& [mu, c] : pv) fock_add(v, mu, -(coef * c));
    }
    proj.emplace_back(lam, fock_clear_denominators(v));
    out[lam] = std::move(v);
  }
  return out;
}

// ----------------------------------------------------------------------
// Jack and Macdonald transition matrices

/// Jack basis of Appendix A: J_lambda = (-eps1)^n [prod (arm*theta+leg+1) P^(theta)]
/// with p_i -> -eps2 p_i and theta = -eps2/eps1.
inline OpMatrix jack_matrix(int n) {
  if (n < 1) throw std::domain_error("jack_matrix: n >= 1");
  auto parts = partitions_of(n);
  FieldElement theta = -(fe_var(VE2) / fe_var(VE1));
  auto basis = gram_schmidt_basis(n, [&](const Partition& mu) {
    return theta.pow_int(mu.length());
  });
  OpMatrix J(n, int(parts.size()), "domdec");
  FieldElement pref = (-fe_var(VE1)).pow_int(n);
  for (int col = 0; col < int(parts.size()); ++col) {
    const Partition& lam = parts[col];
    FieldElement norm = FieldElement::one();
    for (auto& b : boxes(lam))
      norm *= fe_int(b.arm) * theta + fe_int(b.leg + 1);
    const FockVector& v = basis[lam];
    for (auto& [mu, c] : v) {
      int row = partition_index(parts, mu);
      // substitution p_i -> -eps2 p_i scales the p_mu coordinate by (-eps2)^{l(mu)}
      FieldElement scale = (-fe_var(VE2)).pow_int(mu.length());
      J.at(row, col) = pref * norm * c * scale;
    }
  }
  return J;
}

/// Macdonald basis of Appendix B (fixed-point normalization): per column
///   P_lam = J_lam(q, 1/t)[p_k -> p_k/(1-t^{-k})] [p_k -> (-1)^{k-1} p_k] / t2^{n(lam')}
/// with (q,t) = (t2,t1), J the integral form of the monic Macdonald basis.
inline OpMatrix macdonald_matrix(int n) {
  if (n < 1) throw std::domain_error("macdonald_matrix: n >= 1");
  auto parts = partitions_of(n);
  FieldElement t1 = fe_var(VA) * fe_var(VH);
  FieldElement t2 = fe_var(VH) / fe_var(VA);
  FieldElement q = t2, t = t1;
  auto basis = gram_schmidt_basis(n, [&](const Partition& mu) {
    FieldElement w = FieldElement::one();
    for (int k : mu.parts)
      w *= (FieldElement(1) - q.pow_int(k)) / (FieldElement(1) - t.pow_int(k));
    return w;
  });
  // coefficient substitution t -> 1/t with q fixed: a -> 1/h, h -> 1/a
  SubstMap tinv;
  tinv[VA] = VarImage::var(VH, Rational64(-1));
  tinv[VH] = VarImage::var(VA, Rational64(-1));

  OpMatrix P(n, int(parts.size()), "domdec");
  for (int col = 0; col < int(parts.size()); ++col) {
    const Partition& lam = parts[col];
    FieldElement hookprod = FieldElement::one();
    for (auto& b : boxes(lam))
      hookprod *= FieldElement(1) - q.pow_int(b.arm) * t.pow_int(b.leg + 1);
    FieldElement scalar = t2.pow_int(nstat(lam.transpose())).inv();
    for (auto& [mu, c] : basis[lam]) {
      int row = partition_index(parts, mu);
      FieldElement coef = (hookprod * c).substitute(tinv);
      // plethysm p_k -> p_k/(1-t^{-k}) and sign twist p_k -> (-1)^{k-1} p_k
      long sgn = 0;
      for (int k : mu.parts) {
        coef /= FieldElement(1) - t.pow_int(-k);
        sgn += k - 1;
      }
      if (sgn % 2) coef = -coef;
      // the t^{n(lam)} prefactor of the modified Macdonald polynomial cancels
      // against the t1^{-n(lam)} of the fixed-point normalization
      P.at(row, col) = coef * scalar;
    }
  }
  return P;
}

// ----------------------------------------------------------------------
// structural matrices

struct StructuralMatrices {
  OpMatrix fp;      // antidiagonal transposition lambda -> lambda'
  OpMatrix sign_l;  // diag (-1)^{l(mu)} in the p-basis
  OpMatrix P;       // Macdonald transition
  OpMatrix Pstar;   // (-1)^l P fp
  OpMatrix E0;      // diag prod t1^{1-i} t2^{1-j}
  OpMatrix Einf;    // fp E0^{-1} fp
  OpMatrix T;       // P^{-1} P*
  OpMatrix L0;      // P E0 P^{-1}: classical K-theoretic multiplication in the p-basis
};

inline OpMatrix fp_matrix(int n) {
  auto parts = partitions_of(n);
  OpMatrix f(n, int(parts.size()), "domdec");
  for (int i = 0; i < int(parts.size()); ++i)
    f.at(i, partition_index(parts, parts[i].transpose())) = FieldElement::one();
  return f;
}

inline OpMatrix sign_l_matrix(int n) {
  auto parts = partitions_of(n);
  std::vector<FieldElement> d;
  for (auto& p : parts) d.push_back(fe_int(p.length() % 2 ? -1 : 1));
  auto m = OpMatrix::diagonal(n, std::move(d));
  m.set_order_tag("domdec");
  return m;
}

/// E0 eigenvalue of the fixed point lambda: prod_boxes t1^{1-i} t2^{1-j}.
inline FieldElement e0_eigenvalue(const Partition& lam) {
  long x = 0, y = 0;
  for (auto& b : boxes(lam)) { x += 1 - b.i; y += 1 - b.j; }
  // t1^x t2^y = a^{x-y} h^{x+y}
  return fe_var(VA, Rational64(x - y)) * fe_var(VH, Rational64(x + y));
}

inline OpMatrix e0_matrix(int n) {
  auto parts = partitions_of(n);
  std::vector<FieldElement> d;
  for (auto& p : parts) d.push_back(e0_eigenvalue(p));
  auto m = OpMatrix::diagonal(n, std::move(d));
  m.set_order_tag("domdec");
  return m;
}

inline StructuralMatrices structural_matrices(int n) {
  StructuralMatrices s{fp_matrix(n), sign_l_matrix(n), macdonald_matrix(n),
                       OpMatrix{},   e0_matrix(n),     OpMatrix{},
                       OpMatrix{},   OpMatrix{}};
  s.Pstar = s.sign_l * s.P * s.fp;
  s.Einf = s.fp * s.E0.inverse() * s.fp;
  OpMatrix Pinv = s.P.inverse();
  s.T = Pinv * s.Pstar;
  s.L0 = s.P * s.E0 * Pinv;
  return s;
}

/// Eigenvalue of the cohomological m(0) on J_lambda:
/// c0_lambda = sum (1-i) eps1 + (1-j) eps2.
inline FieldElement c0_eigenvalue(const Partition& lam) {
  long x = 0, y = 0;
  for (auto& b : boxes(lam)) { x += 1 - b.i; y += 1 - b.j; }
  return fe_int(x) * fe_var(VE1) + fe_int(y) * fe_var(VE2);
}

} // namespace hilb
