#pragma once

#include "afc/corrector.hpp"
#include "afc/sim.hpp"

namespace afc {

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a generated litmus program promises: the two instance objects, the
/// position of the last arbitration step, and the final readers expected to
/// miss a visible write on every receive-free arbitration branch.
struct LitmusDescriptor {
  std::string formula;
  ObjectId x0;
  ObjectId x1;
  std::size_t d_v = 0;
  std::vector<EventId> expected_misreaders;
};

struct GeneratedLitmus {
  Program program;
  LitmusDescriptor descriptor;
};

namespace litmus_detail {

inline std::size_t last_ar_index(const VisibilityFormula& v) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < v.steps.size(); ++i)
    if (v.steps[i].kind() == RelExpr::Kind::Ar) d = i + 1;
  return d;  // 0 = no arbitration step
}

inline std::set<std::size_t> onx_slots(const VisibilityFormula& v) {
  std::set<std::size_t> out;
  for (const auto& c : v.conflicts)
    if (c.kind == ConflictConstraint::Kind::OnX)
      out.insert(c.members.begin(), c.members.end());
  return out;
}

struct SlotPlan {
  std::size_t slot;
  ReplicaId replica;
  ObjectId object;   // the single object the event accesses
  bool needs_read;
  bool needs_write;
};

/// Slot layout of the two-replica construction for one instance l:
/// slots i < d_v run at r_l on x_l; slots i >= d_v run at r_{1-l} and access
/// that replica's own object, except the final slot which reads x_l.
inline std::vector<SlotPlan> layout(const VisibilityFormula& v, std::size_t d_v,
                                    int l) {
  std::size_t n = v.length();
  std::set<std::size_t> writers = onx_slots(v);
  for (const auto& c : v.conflicts)
    if (c.kind == ConflictConstraint::Kind::SharedObject)
      writers.insert(c.members.begin(), c.members.end());

  std::vector<SlotPlan> out;
  for (std::size_t i = 0; i <= n; ++i) {
    SlotPlan p;
    p.slot = i;
    ReplicaId host = i < d_v ? ("r" + std::to_string(l))
                             : ("r" + std::to_string(1 - l));
    ObjectId own = i < d_v ? ("x" + std::to_string(l))
                           : ("x" + std::to_string(1 - l));
    p.replica = host;
    p.object = i == n ? ("x" + std::to_string(l)) : own;  // the reader crosses
    p.needs_read = (i > 0 && v.steps[i - 1].kind() == RelExpr::Kind::Wr) || i == n;
    p.needs_write = writers.count(i) > 0 ||
                    (i < n && v.steps[i].kind() == RelExpr::Kind::Wr);
    out.push_back(p);
  }
  return out;
}

/// Conflict-set realizability for single-object events: every constrained
/// slot must access the instance object, i.e. live in the prefix or be the
/// final reader.
inline void check_single_object_conflicts(const VisibilityFormula& v,
                                          std::size_t d_v) {
  std::size_t n = v.length();
  for (const auto& c : v.conflicts)
    for (std::size_t i : c.members)
      if (i >= d_v && i != n)
        throw ConstructionError(
            "conflict slot " + std::to_string(i) + " of " + v.name +
            " sits in the arbitration-free suffix; single-object events there "
            "access the other replica's object");
}

inline void require(const std::optional<Event>& e, const std::string& what) {
  if (!e) throw ConstructionError("operation specification lacks a " + what);
}

}  // namespace litmus_detail

/// The two-replica litmus program of the basic construction: one dedicated
/// event per formula slot and instance, shapes chosen so that every wr step
/// pairs a writer with a reader; unconditional writes are preferred where a
/// slot leaves the shape free.
inline GeneratedLitmus generate_basic(const VisibilityFormula& v, const OpSpec& spec) {
  using namespace litmus_detail;
  if (!v.is_simple())
    throw ConstructionError("litmus generation needs a simple formula");
  std::size_t d_v = last_ar_index(v);
  if (d_v == 0)
    throw ConstructionError("formula " + v.name +
                            " is arbitration-free: a receive-free run cannot "
                            "violate it, so no litmus program exists");
  if (spec.allows_multiobject())
    throw ConstructionError("generate_basic handles single-object specifications");
  check_single_object_conflicts(v, d_v);

  GeneratedLitmus out;
  out.descriptor.formula = v.name;
  out.descriptor.x0 = "x0";
  out.descriptor.x1 = "x1";
  out.descriptor.d_v = d_v;

  std::map<ReplicaId, std::map<std::size_t, Event>> rows;  // slot-ordered
  for (int l = 0; l < 2; ++l) {
    for (const auto& p : layout(v, d_v, l)) {
      std::optional<Event> e;
      if (p.needs_read && p.needs_write) {
        e = spec.readwrite_shape(p.object, 1);
        require(e, "read-write shape for slot " + std::to_string(p.slot));
      } else if (p.needs_read) {
        e = spec.read_shape(p.object);
        require(e, "read shape");
      } else {
        // Free slots take the unconditional write, like the constrained ones.
        e = spec.write_shape(p.object, 1);
        require(e, "unconditional write shape");
      }
      e->id = "e" + std::to_string(p.slot) + "x" + std::to_string(l);
      e->replica = p.replica;
      rows[p.replica][p.slot] = *e;
      if (p.slot == v.length()) out.descriptor.expected_misreaders.push_back(e->id);
    }
  }
  for (auto& [r, slots] : rows)
    for (auto& [_, e] : slots) out.program.replicas[r].push_back(e);
  out.program.normalize();
  return out;
}

/// The generalized construction. Single-object specs with read-write events
/// compress to the familiar
/// fetch-and-add litmus shapes (one event per replica when the formula is a
/// single arbitration step, and no dedicated event for an unconstrained slot
/// right after the last arbitration step). Multi-object conditional specs get
/// conflict objects y_E and execution-corrector events.
inline GeneratedLitmus generate_general(const VisibilityFormula& v,
                                        const OpSpec& spec) {
  using namespace litmus_detail;
  if (!v.is_simple())
    throw ConstructionError("litmus generation needs a simple formula");
  std::size_t n = v.length();
  std::size_t d_v = last_ar_index(v);
  if (d_v == 0)
    throw ConstructionError("formula " + v.name +
                            " is arbitration-free: a receive-free run cannot "
                            "violate it, so no litmus program exists");

  // Single-object specifications.
  if (!spec.allows_multiobject()) {
    if (!spec.allows_readwrites()) return generate_basic(v, spec);
    check_single_object_conflicts(v, d_v);

    GeneratedLitmus out;
    out.descriptor.formula = v.name;
    out.descriptor.d_v = d_v;

    if (n == 1) {
      // Both slots collapse onto one read-write per replica on a shared
      // object: the writer of one instance is the reader of the other.
      out.descriptor.x0 = out.descriptor.x1 = "x";
      for (int l = 0; l < 2; ++l) {
        auto e = spec.readwrite_shape("x", l + 1);
        require(e, "read-write shape");
        e->id = "f" + std::to_string(l);
        e->replica = "r" + std::to_string(l);
        out.program.replicas[e->replica].push_back(*e);
        out.descriptor.expected_misreaders.push_back(e->id);
      }
      out.program.normalize();
      return out;
    }

    out.descriptor.x0 = "x0";
    out.descriptor.x1 = "x1";
    std::set<std::size_t> constrained = onx_slots(v);
    for (const auto& c : v.conflicts)
      constrained.insert(c.members.begin(), c.members.end());

    std::map<ReplicaId, std::map<std::size_t, Event>> rows;
    for (int l = 0; l < 2; ++l) {
      for (const auto& p : layout(v, d_v, l)) {
        // The slot right after the last arbitration step can be played by the
        // host replica's own prefix event; skip it when unconstrained.
        bool droppable = p.slot == d_v && p.slot != n && !constrained.count(p.slot) &&
                         v.steps[p.slot - 1].kind() != RelExpr::Kind::Wr &&
                         (p.slot == n || v.steps[p.slot].kind() != RelExpr::Kind::Wr);
        if (droppable) continue;
        auto e = spec.readwrite_shape(p.object, 1);
        require(e, "read-write shape");
        e->id = "e" + std::to_string(p.slot) + "x" + std::to_string(l);
        e->replica = p.replica;
        rows[p.replica][p.slot] = *e;
        if (p.slot == n) out.descriptor.expected_misreaders.push_back(e->id);
      }
    }
    for (auto& [r, slots] : rows)
      for (auto& [_, e] : slots) out.program.replicas[r].push_back(e);
    out.program.normalize();
    return out;
  }

  // Multi-object conditional specifications (insdel, simple_sql).
  if (!spec.supports_corrector())
    throw ConstructionError("corrector synthesis unsupported for " + spec.name());

  GeneratedLitmus out;
  out.descriptor.formula = v.name;
  out.descriptor.x0 = "x0";
  out.descriptor.x1 = "x1";
  out.descriptor.d_v = d_v;

  // A distinct object per shared-conflict set, named by its slot indices.
  std::map<std::size_t, ObjectId> conflict_obj;  // index into v.conflicts
  for (std::size_t ci = 0; ci < v.conflicts.size(); ++ci) {
    if (v.conflicts[ci].kind != ConflictConstraint::Kind::SharedObject) continue;
    ObjectId y = "y";
    for (std::size_t i : v.conflicts[ci].members) y += std::to_string(i);
    conflict_obj[ci] = y;
  }
  std::set<std::size_t> onx = onx_slots(v);

  // Per-replica visible value of each object in a receive-free run.
  std::map<ReplicaId, std::map<ObjectId, Value>> state;
  auto visible = [&](const ReplicaId& r, const ObjectId& o) -> Value {
    auto rit = state.find(r);
    if (rit != state.end()) {
      auto oit = rit->second.find(o);
      if (oit != rit->second.end()) return oit->second;
    }
    return spec.initial_value(o);
  };

  std::map<ReplicaId, std::map<std::size_t, std::vector<Event>>> rows;
  int fresh = 0;
  for (int l = 0; l < 2; ++l) {
    for (const auto& p : layout(v, d_v, l)) {
      std::set<ObjectId> writeset;
      if (p.needs_write) writeset.insert(p.object);
      for (std::size_t ci = 0; ci < v.conflicts.size(); ++ci)
        if (conflict_obj.count(ci) && v.conflicts[ci].members.count(p.slot))
          writeset.insert(conflict_obj.at(ci));
      // Chain objects realize wr steps between consecutive slots.
      std::set<ObjectId> domain = writeset;
      domain.insert(p.object);
      ObjectId chain_prev = "o" + std::to_string(p.slot - 1) + "s" + std::to_string(l);
      ObjectId chain_next = "o" + std::to_string(p.slot) + "s" + std::to_string(l);
      if (p.slot > 0 && v.steps[p.slot - 1].kind() == RelExpr::Kind::Wr)
        domain.insert(chain_prev);
      if (p.slot < n && v.steps[p.slot].kind() == RelExpr::Kind::Wr)
        writeset.insert(chain_next), domain.insert(chain_next);

      ObjectId pivot = writeset.empty() ? p.object : *writeset.begin();
      if (writeset.count(p.object)) pivot = p.object;

      std::optional<Event> e =
          spec.cond_readwrite_shape(domain, writeset, visible(p.replica, pivot));
      require(e, "conditional read-write shape over " + std::to_string(domain.size()) +
                     " objects");
      e->id = "e" + std::to_string(p.slot) + "x" + std::to_string(l);
      e->replica = p.replica;

      // Corrector events flip the visible values so that e writes exactly its
      // write set. They must never touch the instance objects x0/x1.
      std::vector<Event> correction;
      for (const auto& y : domain) {
        if (y == pivot) continue;
        Value vy = visible(p.replica, y);
        bool want = writeset.count(y) > 0;
        bool would = spec.wspec(*e, y, vy).has_value();
        if (want == would) continue;
        if (y == out.descriptor.x0 || y == out.descriptor.x1)
          throw ConstructionError("formula " + v.name +
                                  " would need a corrector writing an instance "
                                  "object; the case analysis is ambiguous");
        // The flip writes y once, leaving it in the opposite presence state.
        auto fix = spec.cond_readwrite_shape({y}, {y}, vy);
        if (!fix) continue;
        fix->id = "a" + std::to_string(fresh++) + "_" + y;
        fix->replica = p.replica;
        auto written = spec.wspec(*fix, y, vy);
        if (written) state[p.replica][y] = *written;
        correction.push_back(*fix);
      }
      // Recompute e against the corrected state.
      e = spec.cond_readwrite_shape(domain, writeset, visible(p.replica, pivot));
      e->id = "e" + std::to_string(p.slot) + "x" + std::to_string(l);
      e->replica = p.replica;
      for (const auto& y : domain) {
        auto written = spec.wspec(*e, y, visible(p.replica, y));
        if (written) state[p.replica][y] = *written;
      }
      correction.push_back(*e);
      rows[p.replica][p.slot] = std::move(correction);
      if (p.slot == n) out.descriptor.expected_misreaders.push_back(e->id);
    }
  }
  for (auto& [r, slots] : rows)
    for (auto& [_, seq] : slots)
      for (auto& e : seq) out.program.replicas[r].push_back(e);
  out.program.normalize();
  return out;
}

struct LitmusVerification {
  bool violation_confirmed = false;
  bool availability_failure = false;
  std::size_t branches = 0;
  std::size_t invalid_branches = 0;
  std::vector<std::string> notes;
};

/// Runs the program receive-free and checks that NO induced execution (over
/// all arbitration completions) is valid w.r.t. (m, spec); reports which
/// branch violates through which event.
inline LitmusVerification run_and_verify(const Program& p, const StorageImpl& impl,
                                         const ConsistencyModel& m,
                                         const OpSpec& spec,
                                         std::size_t cap = 200000) {
  LitmusVerification out;
  Trace t;
  try {
    t = run(p, impl, Scheduler{Scheduler::Policy::NoReceive, 0});
  } catch (const WaitingReplica& w) {
    out.availability_failure = true;
    out.notes.push_back(w.what());
    return out;
  }

  bool some_valid = false;
  for (const auto& xe : induced_executions(t, cap)) {
    ++out.branches;
    Verdict v = check_exec(m, spec, xe);
    if (v.valid) {
      some_valid = true;
    } else {
      ++out.invalid_branches;
      if (out.notes.size() < 8) {
        std::string ar_desc;
        for (const auto& id : xe.ar_order()) ar_desc += id + " ";
        const Violation& first = v.violations.front();
        out.notes.push_back("ar [" + ar_desc + "] violated at event " + first.event +
                            " on " + first.object + ": expected wr " +
                            first.expected_wr + ", found " + first.found_wr);
      }
    }
  }
  out.violation_confirmed = !some_valid && out.branches > 0;
  return out;
}

}  // namespace afc
