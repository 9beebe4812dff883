#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gwp1/poly.hpp"
#include "gwp1/series.hpp"

namespace gwp1 {

using json = nlohmann::ordered_json;

inline json alphabet_to_json(const Alphabet& a) {
  json g = json::array();
  for (const auto& gr : a.gradings()) g.push_back({{"name", gr.name}, {"weights", gr.weights}, {"cap", gr.cap}});
  std::vector<int> laurent;
  for (bool b : a.laurent_flags()) laurent.push_back(b ? 1 : 0);
  return {{"variables", a.names()}, {"laurent", laurent}, {"gradings", g}};
}

inline AlphabetPtr alphabet_from_json(const json& j) {
  try {
    std::vector<Grading> gradings;
    for (const auto& g : j.at("gradings"))
      gradings.push_back({g.at("name").get<std::string>(), g.at("weights").get<std::vector<int>>(),
                          g.at("cap").get<int>()});
    std::vector<bool> laurent;
    for (const auto& b : j.at("laurent")) laurent.push_back(b.get<int>() != 0);
    return make_alphabet(j.at("variables").get<std::vector<std::string>>(), std::move(gradings),
                         std::move(laurent));
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("bad alphabet json: ") + e.what());
  }
}

inline json exponents_to_json(const Monomial& m, std::size_t n) {
  json e = json::array();
  for (std::size_t i = 0; i < n; ++i) e.push_back(int(m.e[i]));
  return e;
}

inline Monomial exponents_from_json(const json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw ContractError("exponent vector has wrong length");
  Monomial m;
  for (std::size_t i = 0; i < n; ++i) m.e[i] = static_cast<std::int16_t>(j[i].get<int>());
  return m;
}

inline json poly_terms_json(const Poly& p, std::size_t n) {
  json t = json::array();
  for (const auto& [m, c] : p.terms()) t.push_back(json::array({exponents_to_json(m, n), to_string(c)}));
  return t;
}

inline json to_json(const Poly& p) {
  return {{"alphabet", alphabet_to_json(*p.alphabet())}, {"terms", poly_terms_json(p, p.alphabet()->size())}};
}

inline Poly poly_from_json(const json& j, AlphabetPtr alpha = nullptr) {
  if (!alpha) alpha = alphabet_from_json(j.at("alphabet"));
  std::vector<Poly::Term> terms;
  for (const auto& t : j.at("terms"))
    terms.emplace_back(exponents_from_json(t.at(0), alpha->size()), parse_rational(t.at(1).get<std::string>()));
  Poly p = Poly::from_terms(alpha, terms);
  if (p.size() != terms.size()) throw ContractError("non-canonical polynomial json (repeated, zero or capped terms)");
  return p;
}

inline json to_json(const Series& s) {
  const std::size_t n = s.alphabet()->size();
  json t = json::array();
  for (const auto& [e, c] : s.terms())
    for (const auto& [m, r] : c.terms()) t.push_back(json::array({e, exponents_to_json(m, n), to_string(r)}));
  json j = {{"variable", s.var()}, {"alphabet", alphabet_to_json(*s.alphabet())}};
  j["floor"] = s.floor() ? json(*s.floor()) : json(nullptr);
  j["terms"] = std::move(t);
  return j;
}

inline Series series_from_json(const json& j) {
  try {
    auto alpha = alphabet_from_json(j.at("alphabet"));
    std::optional<int> fl;
    if (!j.at("floor").is_null()) fl = j.at("floor").get<int>();
    Series s(alpha, fl, j.at("variable").get<std::string>());
    std::map<int, std::vector<Poly::Term>> grouped;
    for (const auto& t : j.at("terms"))
      grouped[t.at(0).get<int>()].emplace_back(exponents_from_json(t.at(1), alpha->size()),
                                               parse_rational(t.at(2).get<std::string>()));
    for (auto& [e, terms] : grouped) {
      if (fl && e < *fl) throw ContractError("series json has a term below its floor");
      s.set(e, Poly::from_terms(alpha, terms));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("bad series json: ") + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(); }

}  // namespace gwp1
