#pragma once
#include "hilb/rational.hpp"
#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilb {

struct SizeMismatch : std::domain_error {
  explicit SizeMismatch(const std::string& m) : std::domain_error(m) {}
};

/// Integer partition, parts weakly decreasing.
struct Partition {
  std::vector<int> parts;

  Partition() = default;
  Partition(std::initializer_list<int> p) : parts(p) { check(); }
  explicit Partition(std::vector<int> p) : parts(std::move(p)) { check(); }

  void check() const {
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
      if (parts[i] < parts[i + 1]) throw std::domain_error("partition not sorted");
    for (int x : parts)
      if (x <= 0) throw std::domain_error("partition parts must be positive");
  }

  int size() const {
    int s = 0;
    for (int x : parts) s += x;
    return s;
  }
  int length() const { return int(parts.size()); }

  Partition transpose() const {
    Partition t;
    if (parts.empty()) return t;
    for (int j = 0; j < parts[0]; ++j) {
      int c = 0;
      for (int x : parts)
        if (x > j) ++c;
      t.parts.push_back(c);
    }
    return t;
  }

  bool operator==(const Partition& o) const { return parts == o.parts; }
  bool operator<(const Partition& o) const { return parts < o.parts; }

  std::string str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts[i]);
    }
    return s + "]";
  }

  /// Multiplicity of part k.
  int mult(int k) const {
    int c = 0;
    for (int x : parts) c += (x == k);
    return c;
  }

  /// z_lambda = prod k^{m_k} m_k!
  Rat z_factor() const {
    Rat z(1);
    int prev = -1, run = 0;
    for (std::size_t i = 0; i <= parts.size(); ++i) {
      int cur = i < parts.size() ? parts[i] : -2;
      if (cur == prev) { ++run; z *= Rat(prev) * Rat(run); }
      else { prev = cur; run = 1; if (i < parts.size()) z *= Rat(cur); }
    }
    return z;
  }
};

struct BoxStat {
  int i, j;       // 1-based row, column
  int arm, leg;   // arm = lambda_i - j, leg = lambda'_j - i
  int hook;       // arm + leg + 1
  int content;    // j - i
};

inline std::vector<BoxStat> boxes(const Partition& p) {
  std::vector<BoxStat> out;
  Partition t = p.transpose();
  for (int i = 1; i <= p.length(); ++i)
    for (int j = 1; j <= p.parts[i - 1]; ++j) {
      BoxStat b;
      b.i = i; b.j = j;
      b.arm = p.parts[i - 1] - j;
      b.leg = t.parts[j - 1] - i;
      b.hook = b.arm + b.leg + 1;
      b.content = j - i;
      out.push_back(b);
    }
  return out;
}

inline int content_sum(const Partition& p) {
  int s = 0;
  for (auto& b : boxes(p)) s += b.content;
  return s;
}

/// n(lambda) = sum (i-1) lambda_i
inline int nstat(const Partition& p) {
  int s = 0;
  for (int i = 0; i < p.length(); ++i) s += i * p.parts[i];
  return s;
}

/// Canonical order: lexicographically descending on parts; refines dominance,
/// [n] first, [1^n] last.
inline std::vector<Partition> partitions_of(int n) {
  if (n < 0) throw std::domain_error("partitions_of: negative n");
  std::vector<Partition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int rem, int maxp) {
    if (rem == 0) {
      out.push_back(Partition(cur));
      return;
    }
    for (int k = std::min(rem, maxp); k >= 1; --k) {
      cur.push_back(k);
      rec(rem - k, k);
      cur.pop_back();
    }
  };
  rec(n, n == 0 ? 1 : n);
  return out;  // descending-first recursion emits lex-descending order
}

inline int partition_index(const std::vector<Partition>& list, const Partition& p) {
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i] == p) return int(i);
  throw std::domain_error("partition not found: " + p.str());
}

enum class DomCmp { Greater, Less, Equal, Incomparable };

inline DomCmp dominance_compare(const Partition& x, const Partition& y) {
  if (x.size() != y.size()) throw SizeMismatch("dominance_compare: |x| != |y|");
  if (x == y) return DomCmp::Equal;
  bool ge = true, le = true;
  int sx = 0, sy = 0;
  std::size_t m = std::max(x.parts.size(), y.parts.size());
  for (std::size_t i = 0; i < m; ++i) {
    sx += i < x.parts.size() ? x.parts[i] : 0;
    sy += i < y.parts.size() ? y.parts[i] : 0;
    if (sx < sy) ge = false;
    if (sx > sy) le = false;
  }
  if (ge) return DomCmp::Greater;
  if (le) return DomCmp::Less;
  return DomCmp::Incomparable;
}

/// Reduced rational slope; "active" wall for n iff 1 <= den <= n.
using Wall = Rational64;

/// All reduced a/b in the interval with 1 <= b <= n, ascending.
/// Bounds lo/hi with closed flags.
inline std::vector<Wall> walls_in_interval(int n, Rational64 lo, bool lo_closed,
                                           Rational64 hi, bool hi_closed) {
  std::vector<Wall> out;
  for (long b = 1; b <= n; ++b) {
    long amin = (lo * Rational64(b)).ceil() - 2;
    long amax = (hi * Rational64(b)).floor() + 2;
    for (long a = amin; a <= amax; ++a) {
      if (std::gcd(std::labs(a), b) != 1) continue;
      Rational64 w(a, b);
      if (w < lo || (w == lo && !lo_closed)) continue;
      if (hi < w || (w == hi && !hi_closed)) continue;
      out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct TangentWeight {
  int a_exp;  // exponent of a
  int h_exp;  // exponent of h = hbar^{1/2}
  bool operator==(const TangentWeight& o) const { return a_exp == o.a_exp && h_exp == o.h_exp; }
  bool operator<(const TangentWeight& o) const {
    return a_exp != o.a_exp ? a_exp < o.a_exp : h_exp < o.h_exp;
  }
};

struct TangentData {
  std::vector<TangentWeight> attracting;  // N^+: a^{hook} h^{-arm+leg+1}
  std::vector<TangentWeight> repelling;   // N^-: a^{-hook} h^{arm-leg+1}
};

inline TangentData tangent_weights(const Partition& p) {
  TangentData t;
  for (auto& b : boxes(p)) {
    t.attracting.push_back({b.hook, -b.arm + b.leg + 1});
    t.repelling.push_back({-b.hook, b.arm - b.leg + 1});
  }
  return t;
}

/// codim_X of the component of Y_w containing the fixed point:
/// 2 * #{boxes with hook*w not integral}; depends on w through den(w) only.
inline int codim_Y(const Partition& p, Wall w) {
  int c = 0;
  for (auto& b : boxes(p))
    if ((long(b.hook) * w.num) % w.den != 0) ++c;
  return 2 * c;
}

} // namespace hilb
