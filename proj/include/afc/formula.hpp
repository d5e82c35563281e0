#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "afc/relexpr.hpp"

namespace afc {

/// Constrains a subset of the quantified events of a visibility formula to
/// write a common object: some object for SharedObject, the formula's
/// parameter object for OnX. Members index event slots 0..n.
struct ConflictConstraint {
  enum class Kind { SharedObject, OnX };
  Kind kind;
  std::set<std::size_t> members;

  friend bool operator==(const ConflictConstraint& a, const ConflictConstraint& b) {
    return a.kind == b.kind && a.members == b.members;
  }
  friend bool operator<(const ConflictConstraint& a, const ConflictConstraint& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.members < b.members;
  }
};

/// An existentially quantified chain of relation steps Rel_1..Rel_n plus
/// conflict constraints. The final event implicitly reads the parameter
/// object; some OnX constraint must cover slot 0 (the first event writes it).
struct VisibilityFormula {
  std::string name;
  std::vector<RelExpr> steps;
  std::vector<ConflictConstraint> conflicts;

  std::size_t length() const { return steps.size(); }

  bool arbitration_free() const {
    for (const auto& s : steps)
      if (s.contains_leaf(RelExpr::Kind::Ar)) return false;
    return true;
  }

  /// Simple formulas use single base-relation steps (no id, no operators).
  bool is_simple() const {
    for (const auto& s : steps)
      if (!s.is_leaf() || s.kind() == RelExpr::Kind::Id) return false;
    return !steps.empty();
  }

  void validate() const {
    if (steps.empty()) throw std::invalid_argument("formula " + name + ": no steps");
    bool onx_at_zero = false;
    for (const auto& c : conflicts) {
      if (c.members.empty())
        throw std::invalid_argument("formula " + name + ": empty conflict set");
      for (std::size_t i : c.members)
        if (i > steps.size())
          throw std::invalid_argument("formula " + name + ": conflict index " +
                                      std::to_string(i) + " outside 0.." +
                                      std::to_string(steps.size()));
      if (c.kind == ConflictConstraint::Kind::OnX && c.members.count(0))
        onx_at_zero = true;
    }
    if (!onx_at_zero)
      throw std::invalid_argument("formula " + name +
                                  ": needs an on-x conflict covering slot 0");
  }

  std::string str() const {
    std::string out = "formula " + name + "(x) { steps: [";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i) out += ", ";
      out += steps[i].str();
    }
    out += "];";
    for (const auto& c : conflicts) {
      out += c.kind == ConflictConstraint::Kind::OnX ? " conflict_x: {" : " conflict: {";
      bool first = true;
      for (std::size_t m : c.members) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(m);
      }
      out += "};";
    }
    out += " }";
    return out;
  }

  friend bool operator==(const VisibilityFormula& a, const VisibilityFormula& b) {
    return a.steps == b.steps && a.conflicts == b.conflicts;
  }
  friend bool operator<(const VisibilityFormula& a, const VisibilityFormula& b) {
    if (!(a.steps == b.steps)) return a.steps < b.steps;
    return a.conflicts < b.conflicts;
  }
};

inline VisibilityFormula make_formula(std::string name, std::vector<RelExpr> steps,
                                      std::vector<ConflictConstraint> conflicts = {}) {
  VisibilityFormula v;
  v.name = std::move(name);
  v.steps = std::move(steps);
  v.conflicts = std::move(conflicts);
  bool has_onx0 = false;
  for (const auto& c : v.conflicts)
    if (c.kind == ConflictConstraint::Kind::OnX && c.members.count(0)) has_onx0 = true;
  if (!has_onx0)
    v.conflicts.push_back({ConflictConstraint::Kind::OnX, {0}});
  v.validate();
  return v;
}

struct ConsistencyModel {
  std::string name;
  std::vector<VisibilityFormula> formulas;

  bool arbitration_free_syntax() const {
    for (const auto& v : formulas)
      if (!v.arbitration_free()) return false;
    return true;
  }

  ConsistencyModel without(const VisibilityFormula& v) const {
    ConsistencyModel out;
    out.name = name + "\\" + v.name;
    for (const auto& f : formulas)
      if (!(f == v)) out.formulas.push_back(f);
    return out;
  }
};

namespace detail {

// Structural containment in every execution, using the execution axioms
// so <= rb <= ar and wr <= rb <= ar.
inline bool expr_covers_id(const RelExpr& e) {
  using K = RelExpr::Kind;
  switch (e.kind()) {
    case K::Id:
    case K::Opt:
    case K::Star: return true;
    case K::Union: return expr_covers_id(e.kids()[0]) || expr_covers_id(e.kids()[1]);
    case K::Compose: return expr_covers_id(e.kids()[0]) && expr_covers_id(e.kids()[1]);
    case K::Plus: return expr_covers_id(e.kids()[0]);
    default: return false;
  }
}

inline bool expr_covers_base(const RelExpr& e, RelExpr::Kind base) {
  using K = RelExpr::Kind;
  switch (e.kind()) {
    case K::So: return base == K::So;
    case K::Wr: return base == K::Wr;
    case K::Rb:
    case K::Ar: return base == K::So || base == K::Wr || base == K::Rb;
    case K::Id: return false;
    case K::Union:
      return expr_covers_base(e.kids()[0], base) || expr_covers_base(e.kids()[1], base);
    case K::Compose:
      return (expr_covers_base(e.kids()[0], base) && expr_covers_id(e.kids()[1])) ||
             (expr_covers_id(e.kids()[0]) && expr_covers_base(e.kids()[1], base));
    case K::Opt:
    case K::Star:
    case K::Plus: return expr_covers_base(e.kids()[0], base);
  }
  return false;
}

}  // namespace detail

/// Structural check that the model carries the mandatory read-my-own-writes
/// and well-formedness formulas: some length-1 formula whose step covers so,
/// and some whose step covers wr.
inline ValidationReport check_model_wellformed(const ConsistencyModel& m) {
  ValidationReport report;
  bool covers_so = false, covers_wr = false;
  for (const auto& v : m.formulas) {
    if (v.length() != 1) continue;
    if (detail::expr_covers_base(v.steps[0], RelExpr::Kind::So)) covers_so = true;
    if (detail::expr_covers_base(v.steps[0], RelExpr::Kind::Wr)) covers_wr = true;
  }
  if (!covers_so) report.fail("model " + m.name + " lacks a formula covering so");
  if (!covers_wr) report.fail("model " + m.name + " lacks a formula covering wr");
  return report;
}

/// Evaluates visibility formulas over one execution, caching per-formula
/// fired-pair relations. The writes predicate reads the events' stored wval.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const AbstractExecution& xe) : xe_(&xe), rels_(xe) {
    for (const auto& e : xe.history().events())
      for (const auto& [x, _] : e.wval) objects_.insert(x);
  }

  const AbstractExecution& execution() const { return *xe_; }

  /// All pairs (w, r) such that v_x(w, r) holds.
  const PairSet& fired(const VisibilityFormula& v, const ObjectId& x) {
    auto key = v.str() + "@" + x;
    auto it = fired_.find(key);
    if (it != fired_.end()) return it->second;

    PairSet out;
    std::vector<const ConflictConstraint*> shared;
    for (const auto& c : v.conflicts)
      if (c.kind == ConflictConstraint::Kind::SharedObject) shared.push_back(&c);

    std::vector<ObjectId> candidates(objects_.begin(), objects_.end());
    std::vector<ObjectId> assign(shared.size());
    enumerate_assignments(v, x, shared, candidates, assign, 0, out);
    return fired_.emplace(std::move(key), std::move(out)).first->second;
  }

  bool holds(const VisibilityFormula& v, const ObjectId& x, const EventId& w,
             const EventId& r) {
    return fired(v, x).contains(w, r);
  }

  /// Witness assignment of the quantified events when v_x(w, r) holds.
  std::optional<std::vector<EventId>> witness(const VisibilityFormula& v,
                                              const ObjectId& x, const EventId& w,
                                              const EventId& r) {
    std::vector<const ConflictConstraint*> shared;
    for (const auto& c : v.conflicts)
      if (c.kind == ConflictConstraint::Kind::SharedObject) shared.push_back(&c);
    std::vector<ObjectId> candidates(objects_.begin(), objects_.end());
    if (shared.empty()) candidates = {x};  // single dummy iteration
    std::vector<ObjectId> assign(shared.size());
    return witness_assignments(v, x, shared, candidates, assign, 0, w, r);
  }

 private:
  bool slot_ok(const VisibilityFormula& v, const ObjectId& x,
               const std::vector<const ConflictConstraint*>& shared,
               const std::vector<ObjectId>& assign, std::size_t slot,
               const Event& e) const {
    for (const auto& c : v.conflicts)
      if (c.kind == ConflictConstraint::Kind::OnX && c.members.count(slot) &&
          !e.writes(x))
        return false;
    for (std::size_t j = 0; j < shared.size(); ++j)
      if (shared[j]->members.count(slot) && !e.writes(assign[j])) return false;
    return true;
  }

  void enumerate_assignments(const VisibilityFormula& v, const ObjectId& x,
                             const std::vector<const ConflictConstraint*>& shared,
                             const std::vector<ObjectId>& candidates,
                             std::vector<ObjectId>& assign, std::size_t j,
                             PairSet& out) {
    if (j == shared.size()) {
      chain(v, x, shared, assign, out);
      return;
    }
    for (const auto& y : candidates) {
      assign[j] = y;
      enumerate_assignments(v, x, shared, candidates, assign, j + 1, out);
    }
  }

  // Forward chain: start from every admissible slot-0 event, follow each
  // step relation filtering by slot admissibility, require the final event
  // to read x.
  void chain(const VisibilityFormula& v, const ObjectId& x,
             const std::vector<const ConflictConstraint*>& shared,
             const std::vector<ObjectId>& assign, PairSet& out) {
    const History& h = xe_->history();
    PairSet frontier;  // (w, current)
    for (const auto& e : h.events())
      if (slot_ok(v, x, shared, assign, 0, e)) frontier.insert(e.id, e.id);

    for (std::size_t i = 0; i < v.steps.size(); ++i) {
      const PairSet& rel = rels_.materialize(v.steps[i]);
      PairSet next;
      for (const auto& [w, cur] : frontier.pairs())
        for (const auto& [a, b] : rel.pairs())
          if (a == cur && slot_ok(v, x, shared, assign, i + 1, h.event(b)))
            next.insert(w, b);
      frontier = std::move(next);
      if (frontier.empty()) return;
    }
    for (const auto& [w, r] : frontier.pairs())
      if (h.reads(x, r)) out.insert(w, r);
  }

  std::optional<std::vector<EventId>> witness_assignments(
      const VisibilityFormula& v, const ObjectId& x,
      const std::vector<const ConflictConstraint*>& shared,
      const std::vector<ObjectId>& candidates, std::vector<ObjectId>& assign,
      std::size_t j, const EventId& w, const EventId& r) {
    if (j == shared.size()) return witness_chain(v, x, shared, assign, w, r);
    for (const auto& y : candidates) {
      assign[j] = y;
      auto found = witness_assignments(v, x, shared, candidates, assign, j + 1, w, r);
      if (found) return found;
    }
    return std::nullopt;
  }

  std::optional<std::vector<EventId>> witness_chain(
      const VisibilityFormula& v, const ObjectId& x,
      const std::vector<const ConflictConstraint*>& shared,
      const std::vector<ObjectId>& assign, const EventId& w, const EventId& r) {
    const History& h = xe_->history();
    if (!h.reads(x, r)) return std::nullopt;
    if (!slot_ok(v, x, shared, assign, 0, h.event(w))) return std::nullopt;
    std::vector<EventId> path{w};
    if (dfs(v, x, shared, assign, 1, w, r, path)) return path;
    return std::nullopt;
  }

  bool dfs(const VisibilityFormula& v, const ObjectId& x,
           const std::vector<const ConflictConstraint*>& shared,
           const std::vector<ObjectId>& assign, std::size_t step, const EventId& cur,
           const EventId& target, std::vector<EventId>& path) {
    if (step > v.steps.size()) return cur == target;
    const PairSet& rel = rels_.materialize(v.steps[step - 1]);
    for (const auto& e : xe_->history().events()) {
      if (!rel.contains(cur, e.id)) continue;
      if (!slot_ok(v, x, shared, assign, step, e)) continue;
      if (step == v.steps.size() && e.id != target) continue;
      path.push_back(e.id);
      if (dfs(v, x, shared, assign, step + 1, e.id, target, path)) return true;
      path.pop_back();
    }
    return false;
  }

  const AbstractExecution* xe_;
  RelEvaluator rels_;
  std::set<ObjectId> objects_;
  std::map<std::string, PairSet> fired_;
};

struct HoldsResult {
  bool holds = false;
  std::vector<EventId> witness;  // the chain epsilon_0..epsilon_n when holds
};

inline HoldsResult holds(const VisibilityFormula& v, const ObjectId& x,
                         const AbstractExecution& xe, const EventId& w,
                         const EventId& r) {
  ModelEvaluator ev(xe);
  HoldsResult out;
  out.holds = ev.holds(v, x, w, r);
  if (out.holds) {
    auto path = ev.witness(v, x, w, r);
    if (path) out.witness = *path;
  }
  return out;
}

/// The set of events visible to `r` for object `x` under the model, with rb
/// and ar restricted to it.
inline Context context_of(const ConsistencyModel& m, const ObjectId& x,
                          const AbstractExecution& xe, const EventId& r,
                          ModelEvaluator* ev = nullptr) {
  std::optional<ModelEvaluator> local;
  if (!ev) {
    local.emplace(xe);
    ev = &*local;
  }
  std::set<EventId> members;
  for (const auto& v : m.formulas)
    for (const auto& [w, rr] : ev->fired(v, x).pairs())
      if (rr == r) members.insert(w);

  Context out;
  for (const auto& id : xe.ar_order())
    if (members.count(id)) out.events.push_back(xe.event(id));
  for (const auto& [a, b] : xe.rb().pairs())
    if (members.count(a) && members.count(b)) out.rb.insert(a, b);
  return out;
}

/// Per-execution containment check: true iff the context under m1 is included
/// in the context under m2 for every event and object. Refutation-sound only;
/// the paper's global order quantifies over all executions.
inline bool weaker_than_on(const ConsistencyModel& m1, const ConsistencyModel& m2,
                           const AbstractExecution& xe) {
  ModelEvaluator ev(xe);
  std::set<ObjectId> objs = xe.history().objects();
  for (const auto& e : xe.history().events()) {
    for (const auto& x : objs) {
      Context c1 = context_of(m1, x, xe, e.id, &ev);
      Context c2 = context_of(m2, x, xe, e.id, &ev);
      for (const auto& w : c1.events)
        if (!c2.contains(w.id)) return false;
    }
  }
  return true;
}

}  // namespace afc
