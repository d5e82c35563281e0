#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "afc/formula.hpp"

namespace afc {

namespace builtin {

inline VisibilityFormula return_value() {
  // (e0, e1) in so U wr
  return make_formula("ReturnValue",
                      {RelExpr::unite(RelExpr::leaf(RelExpr::Kind::So),
                                      RelExpr::leaf(RelExpr::Kind::Wr))});
}

inline VisibilityFormula causal() {
  // (e0, e1) in rb+
  return make_formula("Causal", {RelExpr::plus(RelExpr::leaf(RelExpr::Kind::Rb))});
}

inline VisibilityFormula prefix() {
  // (e0, e1) in ar* ; (so U wr)
  return make_formula(
      "Prefix", {RelExpr::seq(RelExpr::star(RelExpr::leaf(RelExpr::Kind::Ar)),
                              RelExpr::unite(RelExpr::leaf(RelExpr::Kind::So),
                                             RelExpr::leaf(RelExpr::Kind::Wr)))});
}

inline VisibilityFormula sc() {
  // (e0, e1) in ar
  return make_formula("SC", {RelExpr::leaf(RelExpr::Kind::Ar)});
}

inline VisibilityFormula conflict() {
  // (e0, e1) in ar*, (e1, e2) in ar, e1 and e2 write a common object
  return make_formula("Conflict",
                      {RelExpr::star(RelExpr::leaf(RelExpr::Kind::Ar)),
                       RelExpr::leaf(RelExpr::Kind::Ar)},
                      {{ConflictConstraint::Kind::SharedObject, {1, 2}}});
}

inline VisibilityFormula k_bounded(std::size_t k) {
  // k arbitration steps; e0..e_{k-1} all write x
  std::vector<RelExpr> steps(k, RelExpr::leaf(RelExpr::Kind::Ar));
  std::set<std::size_t> writers;
  for (std::size_t i = 0; i < k; ++i) writers.insert(i);
  return make_formula("Bounded" + std::to_string(k), std::move(steps),
                      {{ConflictConstraint::Kind::OnX, writers}});
}

inline VisibilityFormula n_psi(std::size_t n) {
  // rb*, then n alternations of (ar, rb*); each ar step's endpoints conflict
  std::vector<RelExpr> steps;
  std::vector<ConflictConstraint> conflicts;
  steps.push_back(RelExpr::star(RelExpr::leaf(RelExpr::Kind::Rb)));
  for (std::size_t i = 1; i <= n; ++i) {
    steps.push_back(RelExpr::leaf(RelExpr::Kind::Ar));
    steps.push_back(RelExpr::star(RelExpr::leaf(RelExpr::Kind::Rb)));
    conflicts.push_back({ConflictConstraint::Kind::SharedObject, {2 * i - 1, 2 * i}});
  }
  return make_formula(std::to_string(n) + "PSI", std::move(steps), std::move(conflicts));
}

}  // namespace builtin

/// Builds one of the built-in consistency models:
///   rvc, cc, pc, sc, ser, si, bs(k), psi(maxN), ccc
/// PSI is an infinite family of formulas; we instantiate n = 1..maxN and the
/// callers surface the truncation in their reports.
inline ConsistencyModel builtin_model(const std::string& spec) {
  auto parse_param = [&](const std::string& prefix) -> std::size_t {
    std::string inner = spec.substr(prefix.size());
    if (inner.size() < 3 || inner.front() != '(' || inner.back() != ')')
      throw std::invalid_argument("malformed model name: " + spec);
    long long k = std::stoll(inner.substr(1, inner.size() - 2));
    if (k < 1) throw std::invalid_argument("model parameter must be >= 1: " + spec);
    return static_cast<std::size_t>(k);
  };

  ConsistencyModel m;
  m.name = spec;
  if (spec == "rvc") {
    m.formulas = {builtin::return_value()};
  } else if (spec == "cc") {
    m.formulas = {builtin::causal()};
  } else if (spec == "pc") {
    m.formulas = {builtin::prefix()};
  } else if (spec == "sc" || spec == "ser") {
    m.formulas = {builtin::sc()};
  } else if (spec == "si") {
    m.formulas = {builtin::prefix(), builtin::conflict()};
  } else if (spec == "ccc") {
    m.formulas = {builtin::causal(), builtin::conflict()};
  } else if (spec.rfind("bs", 0) == 0) {
    m.formulas = {builtin::return_value(), builtin::k_bounded(parse_param("bs"))};
  } else if (spec.rfind("psi", 0) == 0) {
    std::size_t max_n = parse_param("psi");
    m.formulas = {builtin::causal()};
    for (std::size_t n = 1; n <= max_n; ++n) m.formulas.push_back(builtin::n_psi(n));
  } else {
    throw std::invalid_argument("unknown builtin model: " + spec);
  }
  return m;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::set<std::size_t> parse_index_set(const std::string& body,
                                             const std::string& ctx) {
  std::set<std::size_t> out;
  std::string cur;
  for (char c : body + ",") {
    if (c == ',') {
      std::string t = trim(cur);
      cur.clear();
      if (t.empty()) continue;
      out.insert(static_cast<std::size_t>(std::stoull(t)));
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw ParseError("empty conflict set in " + ctx);
  return out;
}

}  // namespace detail

/// Parses one formula declaration:
///   formula NAME(x) { steps: [ar, so|wr, (rb)+]; conflict_x: {0,2}; conflict: {1,2}; }
inline VisibilityFormula parse_formula(const std::string& text) {
  auto expect = [&](std::size_t pos, const std::string& what) {
    if (pos == std::string::npos) throw ParseError("malformed formula: " + text);
  };
  std::size_t kw = text.find("formula");
  expect(kw, "formula");
  std::size_t paren = text.find('(', kw);
  expect(paren, "(");
  std::string name = detail::trim(text.substr(kw + 7, paren - kw - 7));
  std::size_t open = text.find('{', paren);
  std::size_t close = text.rfind('}');
  expect(open, "{");
  expect(close, "}");
  std::string body = text.substr(open + 1, close - open - 1);

  std::vector<RelExpr> steps;
  std::vector<ConflictConstraint> conflicts;

  std::string clause;
  for (char c : body + ";") {
    if (c == ';') {
      std::string t = detail::trim(clause);
      clause.clear();
      if (t.empty()) continue;
      std::size_t colon = t.find(':');
      if (colon == std::string::npos) throw ParseError("missing ':' in clause: " + t);
      std::string key = detail::trim(t.substr(0, colon));
      std::string val = detail::trim(t.substr(colon + 1));
      if (key == "steps") {
        if (val.front() != '[' || val.back() != ']')
          throw ParseError("steps must be bracketed: " + t);
        std::string inner = val.substr(1, val.size() - 2);
        int depth = 0;
        std::string cur;
        for (char ch : inner + ",") {
          if (ch == '(') ++depth;
          if (ch == ')') --depth;
          if (ch == ',' && depth == 0) {
            std::string step = detail::trim(cur);
            cur.clear();
            if (!step.empty()) steps.push_back(RelExpr::parse(step));
          } else {
            cur += ch;
          }
        }
      } else if (key == "conflict_x" || key == "conflict") {
        if (val.front() != '{' || val.back() != '}')
          throw ParseError("conflict sets use braces: " + t);
        conflicts.push_back({key == "conflict_x" ? ConflictConstraint::Kind::OnX
                                                 : ConflictConstraint::Kind::SharedObject,
                             detail::parse_index_set(val.substr(1, val.size() - 2), t)});
      } else {
        throw ParseError("unknown clause '" + key + "' in formula " + name);
      }
    } else {
      clause += c;
    }
  }
  VisibilityFormula v = make_formula(name, std::move(steps), std::move(conflicts));
  return v;
}

/// A model file is a sequence of formula declarations and include lines:
///   include builtin:cc
/// Lines starting with '#' are comments.
inline ConsistencyModel parse_model_source(const std::string& text,
                                           const std::string& name = "user") {
  ConsistencyModel m;
  m.name = name;
  std::istringstream in(text);
  std::string line, pending;
  int depth = 0;
  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("include", 0) == 0 && depth == 0) {
      std::string arg = detail::trim(t.substr(7));
      if (arg.rfind("builtin:", 0) != 0)
        throw ParseError("include expects builtin:<name>, got: " + arg);
      ConsistencyModel inc = builtin_model(arg.substr(8));
      for (auto& f : inc.formulas) m.formulas.push_back(std::move(f));
      continue;
    }
    pending += line + "\n";
    for (char c : line) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
    }
    if (depth == 0 && pending.find('{') != std::string::npos) {
      m.formulas.push_back(parse_formula(pending));
      pending.clear();
    }
  }
  if (!detail::trim(pending).empty())
    throw ParseError("unterminated formula declaration");
  return m;
}

}  // namespace afc
