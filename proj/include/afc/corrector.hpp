#pragma once

#include "afc/builtin_opspecs.hpp"

namespace afc {

struct UnsupportedCorrector : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Auxiliary events inserted before a conditional multi-object read-write so
/// that it writes exactly the chosen object set.
struct Corrector {
  EventId target;
  std::set<ObjectId> writeset;
  ObjectId pivot;
  // Partial mapping over (domain \ {pivot}); iterate in object order.
  std::map<ObjectId, Event> mapping;
};

/// Synthesizes an execution-corrector for a conditional read-write `e`
/// already appended ar-last to `xe`. Returns nothing when impossible (e.g.
/// the last visible write of the pivot disables e's write to it).
inline std::optional<Corrector> find_corrector(const OpSpec& spec,
                                               const ConsistencyModel& m,
                                               const AbstractExecution& xe,
                                               const EventId& e,
                                               const std::set<ObjectId>& writeset,
                                               const ObjectId& pivot) {
  if (!spec.supports_corrector())
    throw UnsupportedCorrector("corrector synthesis unsupported for " + spec.name());
  if (!writeset.empty() && !writeset.count(pivot))
    throw std::invalid_argument("pivot must belong to a nonempty write set");

  const Event& target = xe.event(e);
  Corrector out;
  out.target = e;
  out.writeset = writeset;
  out.pivot = pivot;

  ModelEvaluator ev(xe);
  auto visible = [&](const ObjectId& y) {
    return extract_exec(spec, m, y, xe, e, &ev);
  };

  // The pivot itself cannot be corrected: e must already write it (when the
  // write set is nonempty) given the value currently visible.
  std::optional<Value> pivot_value = visible(pivot);
  bool writes_pivot = spec.wspec(target, pivot, pivot_value).has_value();
  if (!writeset.empty() && !writes_pivot) return std::nullopt;
  if (writeset.empty() && writes_pivot) return std::nullopt;

  if (spec.name() == "simple_sql") return out;  // totally-undefined mapping

  if (spec.name() == "faacas") {
    // Single-object events: the domain minus the pivot is empty.
    return out;
  }

  if (spec.name() == "insdel") {
    int fresh = 0;
    for (const auto& y : target.objs) {
      if (y == pivot) continue;
      std::optional<Value> vy = visible(y);
      bool want = writeset.count(y) > 0;
      bool would = spec.wspec(target, y, vy).has_value();
      if (want == would) continue;
      Event a;
      bool present = vy && !vy->is_tomb();
      if (present)
        a = detail::multi_obj_event("DelPre", {y});
      else
        a = detail::multi_obj_event("InsAbs", {y}, {Value::integer(1)});
      a.id = "corr_" + e + "_" + std::to_string(fresh++) + "_" + y;
      a.replica = target.replica;
      out.mapping[y] = a;
    }
    return out;
  }

  throw UnsupportedCorrector("corrector synthesis unsupported for " + spec.name());
}

/// Inserts `seq` immediately before `e` in rb and ar (and in session order
/// when replicas match). Write-read dependencies of pre-existing events are
/// untouched; the new events read nothing until a caller says otherwise.
inline AbstractExecution apply_correction(const AbstractExecution& xe, const EventId& e,
                                          const std::vector<Event>& seq) {
  for (const auto& a : seq)
    if (xe.history().has_event(a.id))
      throw std::invalid_argument("correction event not fresh: " + a.id);
  if (seq.empty()) return xe;

  const History& old = xe.history();
  const Event& target = old.event(e);

  History h(old.init().wval);
  // Rebuild sessions, splicing same-replica correction events just before e.
  for (const auto& [replica, session] : old.sessions()) {
    for (const auto& id : session) {
      if (id == e)
        for (const auto& a : seq)
          if (a.replica == replica) h.add_event(a);
      h.add_event(old.event(id));
    }
  }
  for (const auto& a : seq)
    if (a.replica != target.replica) h.add_event(a);
  for (const auto& [x, readers] : old.wr())
    for (const auto& [r, ws] : readers) h.set_wr(x, r, ws);

  // ar: the sequence goes immediately before e, in order.
  std::vector<EventId> ar;
  for (const auto& id : xe.ar_order()) {
    if (id == e)
      for (const auto& a : seq) ar.push_back(a.id);
    ar.push_back(id);
  }

  // rb: each inserted event inherits e's rb-predecessors and precedes e; close
  // under ;so* afterwards.
  PairSet rb = xe.rb();
  std::vector<EventId> chain;
  for (const auto& a : seq) chain.push_back(a.id);
  chain.push_back(e);
  for (const auto& [f, g] : xe.rb().pairs())
    if (g == e)
      for (const auto& a : seq) rb.insert(f, a.id);
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = i + 1; j < chain.size(); ++j) rb.insert(chain[i], chain[j]);

  PairSet so = h.so_pairs();
  rb = rb.united(so);
  for (;;) {
    PairSet next = rb.united(rb.composed(so));
    if (next == rb) break;
    rb = next;
  }

  return AbstractExecution(std::move(h), std::move(rb), std::move(ar));
}

}  // namespace afc
