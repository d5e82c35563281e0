#pragma once

#include "afc/validity.hpp"

namespace afc {

// A second validity checker kept deliberately independent of ModelEvaluator:
// relations are evaluated by direct recursion (no materialized pair sets, no
// memoization) and formula quantifiers by explicit tuple expansion. Exists to
// differentially test check_exec.

namespace oracle_detail {

inline bool base_rel(const AbstractExecution& xe, RelExpr::Kind k, const EventId& a,
                     const EventId& b) {
  switch (k) {
    case RelExpr::Kind::Id: return a == b;
    case RelExpr::Kind::So: return xe.history().so(a, b);
    case RelExpr::Kind::Wr: return xe.history().wr_pair(a, b);
    case RelExpr::Kind::Rb: return xe.in_rb(a, b);
    case RelExpr::Kind::Ar: return a != b && xe.ar_before(a, b);
    default: return false;
  }
}

inline bool eval(const RelExpr& r, const AbstractExecution& xe, const EventId& a,
                 const EventId& b);

inline bool reach_plus(const RelExpr& step, const AbstractExecution& xe,
                       const EventId& a, const EventId& b,
                       std::set<EventId>& seen) {
  for (const auto& e : xe.history().events()) {
    if (seen.count(e.id)) continue;
    if (!eval(step, xe, a, e.id)) continue;
    if (e.id == b) return true;
    seen.insert(e.id);
    if (reach_plus(step, xe, e.id, b, seen)) return true;
  }
  return false;
}

inline bool eval(const RelExpr& r, const AbstractExecution& xe, const EventId& a,
                 const EventId& b) {
  using K = RelExpr::Kind;
  if (r.is_leaf()) return base_rel(xe, r.kind(), a, b);
  switch (r.kind()) {
    case K::Union:
      return eval(r.kids()[0], xe, a, b) || eval(r.kids()[1], xe, a, b);
    case K::Compose: {
      for (const auto& e : xe.history().events())
        if (eval(r.kids()[0], xe, a, e.id) && eval(r.kids()[1], xe, e.id, b))
          return true;
      return false;
    }
    case K::Opt: return a == b || eval(r.kids()[0], xe, a, b);
    case K::Plus: {
      std::set<EventId> seen{a};
      return reach_plus(r.kids()[0], xe, a, b, seen);
    }
    case K::Star: {
      if (a == b) return true;
      std::set<EventId> seen{a};
      return reach_plus(r.kids()[0], xe, a, b, seen);
    }
    default: return false;
  }
}

inline bool conflict_sat(const ConflictConstraint& c, const ObjectId& x,
                         const AbstractExecution& xe,
                         const std::vector<EventId>& chain) {
  if (c.kind == ConflictConstraint::Kind::OnX) {
    for (std::size_t i : c.members)
      if (!xe.event(chain[i]).writes(x)) return false;
    return true;
  }
  std::set<ObjectId> candidates;
  for (const auto& e : xe.history().events())
    for (const auto& [y, _] : e.wval) candidates.insert(y);
  for (const auto& y : candidates) {
    bool all = true;
    for (std::size_t i : c.members)
      if (!xe.event(chain[i]).writes(y)) all = false;
    if (all) return true;
  }
  return false;
}

inline bool formula_holds(const VisibilityFormula& v, const ObjectId& x,
                          const AbstractExecution& xe, const EventId& w,
                          const EventId& r) {
  if (!xe.history().reads(x, r)) return false;
  std::size_t n = v.length();
  std::vector<EventId> chain(n + 1);
  chain[0] = w;
  chain[n] = r;
  const auto& events = xe.history().events();

  // Odometer over the intermediate quantifiers.
  std::vector<std::size_t> pick(n >= 2 ? n - 1 : 0, 0);
  for (;;) {
    for (std::size_t i = 1; i < n; ++i) chain[i] = events[pick[i - 1]].id;
    bool ok = true;
    for (std::size_t i = 1; i <= n && ok; ++i)
      if (!eval(v.steps[i - 1], xe, chain[i - 1], chain[i])) ok = false;
    for (const auto& c : v.conflicts)
      if (ok && !conflict_sat(c, x, xe, chain)) ok = false;
    if (ok) return true;
    std::size_t d = 0;
    while (d < pick.size()) {
      if (++pick[d] < events.size()) break;
      pick[d++] = 0;
    }
    if (d == pick.size()) return false;
  }
}

inline std::set<EventId> context_events(const ConsistencyModel& m, const ObjectId& x,
                                        const AbstractExecution& xe, const EventId& r) {
  std::set<EventId> out;
  for (const auto& e : xe.history().events())
    for (const auto& v : m.formulas)
      if (formula_holds(v, x, xe, e.id, r)) out.insert(e.id);
  return out;
}

}  // namespace oracle_detail

/// Differential twin of check_exec.
inline Verdict oracle_check_exec(const ConsistencyModel& m, const OpSpec& spec,
                                 const AbstractExecution& xe) {
  for (const auto& e : xe.history().events())
    if (auto err = spec.shape_error(e)) throw ShapeError(*err);

  Verdict verdict;
  std::set<ObjectId> objects = xe.history().objects();

  auto context_for = [&](const ObjectId& x, const EventId& r) {
    std::set<EventId> members = oracle_detail::context_events(m, x, xe, r);
    Context c;
    for (const auto& id : xe.ar_order())
      if (members.count(id)) c.events.push_back(xe.event(id));
    for (const auto& [a, b] : xe.rb().pairs())
      if (members.count(a) && members.count(b)) c.rb.insert(a, b);
    return c;
  };

  std::function<std::optional<Value>(const ObjectId&, const EventId&)> wval_of =
      [&](const ObjectId& x, const EventId& id) -> std::optional<Value> {
    const Event& e = xe.event(id);
    if (e.is_init) return e.written(x);
    std::set<EventId> selected = spec.rspec(e, x, context_for(x, id));
    std::vector<std::pair<EventId, Value>> pairs;
    for (const auto& wid : xe.ar_order()) {
      if (!selected.count(wid)) continue;
      auto v = xe.event(wid).written(x);
      if (!v) return std::nullopt;
      pairs.emplace_back(wid, *v);
    }
    return spec.wspec(e, x, spec.extract(e, x, pairs));
  };

  for (const auto& id : xe.ar_order()) {
    const Event& e = xe.event(id);
    for (const auto& x : objects) {
      std::set<EventId> expected_wr =
          e.is_init ? std::set<EventId>{} : spec.rspec(e, x, context_for(x, id));
      std::set<EventId> found_wr = xe.history().wr_writers(x, id);
      std::optional<Value> expected_wval = wval_of(x, id);
      std::optional<Value> found_wval = e.written(x);
      bool wr_ok = expected_wr == found_wr;
      bool wval_ok = (!expected_wval && !found_wval) ||
                     (expected_wval && found_wval && *expected_wval == *found_wval);
      if (wr_ok && wval_ok) continue;
      verdict.valid = false;
      verdict.violations.push_back({id, x, detail::idset_str(expected_wr),
                                    detail::idset_str(found_wr),
                                    detail::optval_str(expected_wval),
                                    detail::optval_str(found_wval)});
    }
  }
  return verdict;
}

}  // namespace afc
