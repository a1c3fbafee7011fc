#pragma once
#include "hilb/matrix.hpp"
#include "hilb/partitions.hpp"
#include <json.hpp>

namespace hilb {

using Json = nlohmann::ordered_json;

// Coefficients serialize as decimal strings so round trips are bit exact.
inline Json coeff_to_json(const GaussRational& c) {
  return Json::array({c.re.get_num().get_str(), c.re.get_den().get_str(),
                      c.im.get_num().get_str(), c.im.get_den().get_str()});
}

inline GaussRational coeff_from_json(const Json& j) {
  Rat re(Rat(j.at(0).get<std::string>()) / Rat(j.at(1).get<std::string>()));
  Rat im(Rat(j.at(2).get<std::string>()) / Rat(j.at(3).get<std::string>()));
  re.canonicalize();
  im.canonicalize();
  return {re, im};
}

inline Json poly_terms_to_json(const Poly& p, long lattice) {
  Poly q = p;
  q.rescale_to(lattice);
  Json arr = Json::array();
  for (auto& [m, c] : q.terms()) {
    Json t;
    t["c"] = coeff_to_json(c);
    t["e"] = Json::array();
    for (int i = 0; i < NVARS; ++i) t["e"].push_back(m.e[i]);
    arr.push_back(std::move(t));
  }
  return arr;
}

inline Poly poly_terms_from_json(const Json& arr, long lattice) {
  Poly r;
  for (auto& t : arr) {
    Monomial m;
    for (int i = 0; i < NVARS; ++i) m.e[i] = t.at("e").at(i).get<std::int64_t>();
    r += Poly::term(coeff_from_json(t.at("c")), m, lattice);
  }
  return r;
}

inline Json to_json(const FieldElement& f) {
  long lat = std::lcm(f.num().lattice(), f.den().lattice());
  Json j;
  j["vars"] = Json::array();
  for (auto* v : kVarNames) j["vars"].push_back(v);
  j["lattice"] = lat;
  j["num"] = poly_terms_to_json(f.num(), lat);
  j["den"] = poly_terms_to_json(f.den(), lat);
  return j;
}

inline FieldElement field_from_json(const Json& j) {
  long lat = j.at("lattice").get<long>();
  return FieldElement(poly_terms_from_json(j.at("num"), lat),
                      poly_terms_from_json(j.at("den"), lat));
}

inline Json to_json(const OpMatrix& m) {
  Json j;
  j["n"] = m.n();
  j["side"] = m.side();
  j["order_tag"] = m.order_tag();
  j["entries"] = Json::array();
  for (int i = 0; i < m.side(); ++i)
    for (int k = 0; k < m.side(); ++k) j["entries"].push_back(to_json(m.at(i, k)));
  return j;
}

inline OpMatrix matrix_from_json(const Json& j) {
  OpMatrix m(j.at("n").get<int>(), j.at("side").get<int>(), j.at("order_tag").get<std::string>());
  int s = m.side();
  for (int i = 0; i < s; ++i)
    for (int k = 0; k < s; ++k) m.at(i, k) = field_from_json(j.at("entries").at(i * s + k));
  return m;
}

inline Json to_json(const Partition& p) {
  Json j = Json::array();
  for (int x : p.parts) j.push_back(x);
  return j;
}

inline Json wall_to_json(const Wall& w) { return w.str(); }

} // namespace hilb
