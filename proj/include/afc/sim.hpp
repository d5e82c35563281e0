#pragma once

#include <random>

#include "afc/validity.hpp"

namespace afc {

// The labeled-transition-system layer: straight-line programs composed with a
// storage implementation. Replicas are simulated state; a whole run is a pure
// function of (program, scheduler, seed).

struct ActionRec {
  enum class Kind { Init, Synchronized, Send, Receive };
  Kind kind = Kind::Synchronized;
  std::string id;
  ReplicaId replica;
  Event event;                                    // Init / Synchronized
  std::map<ObjectId, std::set<EventId>> wrdeps;   // Synchronized
  std::set<EventId> payload;                      // Send / Receive
  std::string msg_id;

  std::string kind_str() const {
    switch (kind) {
      case Kind::Init: return "init";
      case Kind::Synchronized: return "event";
      case Kind::Send: return "send";
      case Kind::Receive: return "receive";
    }
    return "?";
  }
};

using Trace = std::vector<ActionRec>;

/// Straight-line per-replica invocation sequences.
struct Program {
  std::map<ReplicaId, std::vector<Event>> replicas;

  std::size_t total_events() const {
    std::size_t n = 0;
    for (const auto& [_, session] : replicas) n += session.size();
    return n;
  }

  std::set<ObjectId> objects() const {
    std::set<ObjectId> out;
    for (const auto& [_, session] : replicas)
      for (const auto& e : session) out.insert(e.objs.begin(), e.objs.end());
    return out;
  }

  /// Fills replica fields and missing/duplicate ids deterministically.
  void normalize() {
    std::set<EventId> seen;
    for (auto& [replica, session] : replicas) {
      std::size_t i = 0;
      for (auto& e : session) {
        e.replica = replica;
        if (e.id.empty() || seen.count(e.id))
          e.id = replica + "_" + std::to_string(i);
        seen.insert(e.id);
        ++i;
      }
    }
  }
};

/// A storage implementation as an explicit-state LTS over traces. The trace
/// itself is the state; enabledness predicates inspect it.
class StorageImpl {
 public:
  virtual ~StorageImpl() = default;
  virtual const OpSpec& opspec() const = 0;

  virtual Event make_init(const std::set<ObjectId>& objects) const {
    std::map<ObjectId, Value> values;
    for (const auto& x : objects) values[x] = opspec().initial_value(x);
    return afc::make_init(values);
  }

  /// Whether the program invocation `shape` can execute now at its replica.
  virtual bool sync_enabled(const Trace& t, const Event& shape) const = 0;
  /// The synchronized action (event with computed read-dependencies/values).
  virtual ActionRec sync_action(const Trace& t, const Event& shape) const = 0;
  /// The send enabled at `r`, if any.
  virtual std::optional<ActionRec> send_action(const Trace& t,
                                               const ReplicaId& r) const = 0;
  /// All enabled receive actions (undelivered message x candidate recipient).
  virtual std::vector<ActionRec> receive_actions(
      const Trace& t, const std::vector<ReplicaId>& replicas) const = 0;
};

namespace sim_detail {

inline std::set<EventId> received_events(const Trace& t, const ReplicaId& r) {
  std::set<EventId> out;
  for (const auto& a : t)
    if (a.kind == ActionRec::Kind::Receive && a.replica == r)
      out.insert(a.payload.begin(), a.payload.end());
  return out;
}

inline std::set<EventId> own_events(const Trace& t, const ReplicaId& r) {
  std::set<EventId> out;
  for (const auto& a : t)
    if (a.kind == ActionRec::Kind::Synchronized && a.replica == r)
      out.insert(a.event.id);
  return out;
}

inline const ActionRec* last_non_receive(const Trace& t, const ReplicaId& r) {
  for (auto it = t.rbegin(); it != t.rend(); ++it)
    if (it->replica == r && it->kind != ActionRec::Kind::Receive) return &*it;
  return nullptr;
}

/// Induced receive-before restricted to a pair: session order, or the source
/// was delivered to the target's replica before the target executed.
inline bool induced_rb_pair(const Trace& t, const ActionRec& a_src,
                            const ActionRec& a_dst) {
  if (a_dst.kind != ActionRec::Kind::Synchronized &&
      a_dst.kind != ActionRec::Kind::Init)
    return false;
  if (a_src.kind == ActionRec::Kind::Init) return true;
  if (a_src.replica == a_dst.replica) {
    for (const auto& a : t) {
      if (a.id == a_src.id) return true;  // src occurs first
      if (a.id == a_dst.id) return false;
    }
    return false;
  }
  // Received before a_dst at a_dst's replica?
  for (const auto& a : t) {
    if (a.id == a_dst.id) return false;
    if (a.kind == ActionRec::Kind::Receive && a.replica == a_dst.replica &&
        a.payload.count(a_src.event.id))
      return true;
  }
  return false;
}

}  // namespace sim_detail

/// The available causal-consistency store: every invocation executes
/// immediately against the replica's causal past; after an invocation the
/// replica may broadcast its entire causal past once; messages are consumed
/// by a single receive.
class CausalStore : public StorageImpl {
 public:
  explicit CausalStore(OpSpecPtr spec) : spec_(std::move(spec)) {}

  const OpSpec& opspec() const override { return *spec_; }

  bool sync_enabled(const Trace&, const Event&) const override { return true; }

  ActionRec sync_action(const Trace& t, const Event& shape) const override {
    ActionRec a;
    a.kind = ActionRec::Kind::Synchronized;
    a.id = "x_" + shape.id;
    a.replica = shape.replica;
    a.event = shape;

    std::set<EventId> known = sim_detail::received_events(t, shape.replica);
    for (const auto& x : shape.objs) {
      Context c = store_context(t, shape, known, x);
      std::set<EventId> selected = spec_->rspec(shape, x, c);
      if (!selected.empty()) a.wrdeps[x] = selected;
      std::vector<std::pair<EventId, Value>> pairs;
      for (const auto& ev : c.events) {
        if (!selected.count(ev.id)) continue;
        auto v = ev.written(x);
        if (v) pairs.emplace_back(ev.id, *v);
      }
      auto out = spec_->wspec(shape, x, spec_->extract(shape, x, pairs));
      if (out) a.event.wval[x] = *out;
    }
    return a;
  }

  std::optional<ActionRec> send_action(const Trace& t,
                                       const ReplicaId& r) const override {
    const ActionRec* last = sim_detail::last_non_receive(t, r);
    if (!last || last->kind == ActionRec::Kind::Send) return std::nullopt;

    std::set<EventId> past = sim_detail::own_events(t, r);
    std::set<EventId> received = sim_detail::received_events(t, r);
    past.insert(received.begin(), received.end());
    if (past.empty()) return std::nullopt;
    for (const auto& a : t)  // each causal past is broadcast exactly once
      if (a.kind == ActionRec::Kind::Send && a.payload == past) return std::nullopt;

    ActionRec a;
    a.kind = ActionRec::Kind::Send;
    a.replica = r;
    a.payload = std::move(past);
    a.msg_id = "m" + std::to_string(send_count(t));
    a.id = a.msg_id + "_send";
    return a;
  }

  std::vector<ActionRec> receive_actions(
      const Trace& t, const std::vector<ReplicaId>& replicas) const override {
    std::vector<ActionRec> out;
    for (const auto& a : t) {
      if (a.kind != ActionRec::Kind::Send) continue;
      bool delivered = false;
      for (const auto& b : t)
        if (b.kind == ActionRec::Kind::Receive && b.msg_id == a.msg_id)
          delivered = true;
      if (delivered) continue;
      for (const auto& r : replicas) {
        if (r == a.replica) continue;
        ActionRec rec;
        rec.kind = ActionRec::Kind::Receive;
        rec.replica = r;
        rec.payload = a.payload;
        rec.msg_id = a.msg_id;
        rec.id = a.msg_id + "_rcv_" + r;
        out.push_back(rec);
      }
    }
    return out;
  }

 private:
  static std::size_t send_count(const Trace& t) {
    std::size_t n = 0;
    for (const auto& a : t)
      if (a.kind == ActionRec::Kind::Send) ++n;
    return n;
  }

  /// The x-writers visible to `shape`'s replica (executed there, or received
  /// transitively), with rb and trace order restricted to them.
  Context store_context(const Trace& t, const Event& shape,
                        const std::set<EventId>& known, const ObjectId& x) const {
    Context c;
    std::vector<const ActionRec*> members;
    for (const auto& a : t) {
      if (a.kind != ActionRec::Kind::Synchronized && a.kind != ActionRec::Kind::Init)
        continue;
      if (!a.event.writes(x)) continue;
      if (a.kind != ActionRec::Kind::Init && a.replica != shape.replica &&
          !known.count(a.event.id))
        continue;
      members.push_back(&a);
    }
    for (const auto* a : members) c.events.push_back(a->event);
    for (const auto* a : members)
      for (const auto* b : members)
        if (a != b && sim_detail::induced_rb_pair(t, *a, *b))
          c.rb.insert(a->event.id, b->event.id);
    return c;
  }

  OpSpecPtr spec_;
};

inline std::unique_ptr<StorageImpl> causal_store(OpSpecPtr spec) {
  return std::make_unique<CausalStore>(std::move(spec));
}

/// Asymmetric parallel composition of a straight-line program with a storage
/// implementation: they synchronize on events, storage send/receive actions
/// stay local.
class ComposedLts {
 public:
  ComposedLts(Program p, const StorageImpl* impl) : program_(std::move(p)), impl_(impl) {
    program_.normalize();
    for (const auto& [r, session] : program_.replicas) {
      replicas_.push_back(r);
      for (const auto& e : session)
        if (auto err = impl->opspec().shape_error(e))
          throw std::invalid_argument("program event outside the storage universe: " +
                                      *err);
      next_[r] = 0;
    }
    ActionRec init;
    init.kind = ActionRec::Kind::Init;
    init.id = kInitId;
    init.event = impl->make_init(program_.objects());
    trace_.push_back(std::move(init));
  }

  const Trace& trace() const { return trace_; }
  const Program& program() const { return program_; }
  const std::vector<ReplicaId>& replicas() const { return replicas_; }

  bool program_can_act(const ReplicaId& r) const {
    auto it = program_.replicas.find(r);
    return it != program_.replicas.end() && next_.at(r) < it->second.size();
  }

  bool program_done() const {
    for (const auto& r : replicas_)
      if (program_can_act(r)) return false;
    return true;
  }

  std::optional<ActionRec> next_sync(const ReplicaId& r) const {
    if (!program_can_act(r)) return std::nullopt;
    const Event& shape = program_.replicas.at(r)[next_.at(r)];
    if (!impl_->sync_enabled(trace_, shape)) return std::nullopt;
    return impl_->sync_action(trace_, shape);
  }

  std::optional<ActionRec> next_send(const ReplicaId& r) const {
    return impl_->send_action(trace_, r);
  }

  std::vector<ActionRec> receives() const {
    return impl_->receive_actions(trace_, replicas_);
  }

  /// Every enabled action, deterministically ordered.
  std::vector<ActionRec> enabled() const {
    std::vector<ActionRec> out;
    for (const auto& r : replicas_) {
      if (auto a = next_sync(r)) out.push_back(*a);
      if (auto a = next_send(r)) out.push_back(*a);
    }
    for (auto& a : receives()) out.push_back(std::move(a));
    return out;
  }

  /// Non-receive actions enabled at `r` (the availability condition).
  bool non_receive_enabled(const ReplicaId& r) const {
    return next_sync(r).has_value() || next_send(r).has_value();
  }

  void step(const ActionRec& a) {
    if (a.kind == ActionRec::Kind::Synchronized) {
      auto& idx = next_.at(a.replica);
      const Event& expected = program_.replicas.at(a.replica)[idx];
      if (expected.id != a.event.id)
        throw std::logic_error("scheduler stepped a non-enabled program event");
      ++idx;
    }
    trace_.push_back(a);
  }

 private:
  Program program_;
  const StorageImpl* impl_;
  Trace trace_;
  std::vector<ReplicaId> replicas_;
  std::map<ReplicaId, std::size_t> next_;
};

inline ComposedLts compose(Program p, const StorageImpl& impl) {
  return ComposedLts(std::move(p), &impl);
}

struct Scheduler {
  enum class Policy { NoReceive, EagerDelivery, SeededRandom, AdversarialDelay };
  Policy policy = Policy::NoReceive;
  std::uint64_t seed = 0;

  static Scheduler parse(const std::string& name, std::uint64_t seed) {
    Scheduler s;
    s.seed = seed;
    if (name == "no_receive") s.policy = Policy::NoReceive;
    else if (name == "eager_delivery") s.policy = Policy::EagerDelivery;
    else if (name == "seeded_random") s.policy = Policy::SeededRandom;
    else if (name == "adversarial_delay") s.policy = Policy::AdversarialDelay;
    else throw std::invalid_argument("unknown scheduler: " + name);
    return s;
  }

  std::string str() const {
    switch (policy) {
      case Policy::NoReceive: return "no_receive";
      case Policy::EagerDelivery: return "eager_delivery";
      case Policy::SeededRandom: return "seeded_random";
      case Policy::AdversarialDelay: return "adversarial_delay";
    }
    return "?";
  }
};

struct WaitingReplica : std::runtime_error {
  explicit WaitingReplica(const ReplicaId& r)
      : std::runtime_error("replica " + r + " is waiting: program pending but only "
                           "receive actions enabled"),
        replica(r) {}
  ReplicaId replica;
};

/// Runs the composition to quiescence under the scheduler. Deterministic for
/// a fixed (program, scheduler, seed). Throws WaitingReplica if a replica
/// with pending program invocations has only receive actions enabled.
inline Trace run(ComposedLts lts, const Scheduler& sched) {
  auto check_waiting = [&]() {
    for (const auto& r : lts.replicas())
      if (lts.program_can_act(r) && !lts.non_receive_enabled(r))
        throw WaitingReplica(r);
  };
  check_waiting();

  switch (sched.policy) {
    case Scheduler::Policy::NoReceive: {
      bool progress = true;
      while (progress) {
        progress = false;
        for (const auto& r : lts.replicas()) {
          if (auto a = lts.next_sync(r)) {
            lts.step(*a);
            progress = true;
          } else if (lts.program_can_act(r)) {
            throw WaitingReplica(r);
          }
        }
      }
      return lts.trace();
    }

    case Scheduler::Policy::EagerDelivery: {
      for (const auto& r : lts.replicas()) {
        for (;;) {  // deliver everything pending to r first
          auto recv = lts.receives();
          const ActionRec* mine = nullptr;
          for (const auto& a : recv)
            if (a.replica == r && !mine) mine = &a;
          if (!mine) break;
          lts.step(*mine);
        }
        while (lts.program_can_act(r)) {
          auto a = lts.next_sync(r);
          if (!a) throw WaitingReplica(r);
          lts.step(*a);
          if (auto s = lts.next_send(r)) lts.step(*s);
        }
      }
      return lts.trace();
    }

    case Scheduler::Policy::SeededRandom: {
      std::mt19937_64 rng(sched.seed);
      for (;;) {
        check_waiting();
        auto actions = lts.enabled();
        if (actions.empty()) return lts.trace();
        lts.step(actions[rng() % actions.size()]);
      }
    }

    case Scheduler::Policy::AdversarialDelay: {
      // Partition while the program runs, heal afterwards.
      bool progress = true;
      while (progress) {
        progress = false;
        for (const auto& r : lts.replicas()) {
          if (auto a = lts.next_sync(r)) {
            lts.step(*a);
            if (auto s = lts.next_send(r)) lts.step(*s);
            progress = true;
          } else if (lts.program_can_act(r)) {
            throw WaitingReplica(r);
          }
        }
      }
      for (;;) {
        auto recv = lts.receives();
        if (recv.empty()) return lts.trace();
        lts.step(recv.front());
      }
    }
  }
  return lts.trace();
}

inline Trace run(const Program& p, const StorageImpl& impl, const Scheduler& sched) {
  return run(compose(p, impl), sched);
}

/// History induced by a trace: synchronized events in trace order per replica,
/// write-read from the actions' dependency mappings.
inline History induced_history(const Trace& t) {
  std::map<ObjectId, Value> init_values;
  for (const auto& a : t)
    if (a.kind == ActionRec::Kind::Init) init_values = a.event.wval;
  History h(init_values);
  for (const auto& a : t) {
    if (a.kind != ActionRec::Kind::Synchronized) continue;
    h.add_event(a.event);
    for (const auto& [x, ws] : a.wrdeps) h.set_wr(x, a.event.id, ws);
  }
  return h;
}

/// Receive-before induced by the matching send/receive relation.
inline PairSet induced_rb(const Trace& t) {
  PairSet out;
  for (const auto& a : t) {
    if (a.kind != ActionRec::Kind::Synchronized && a.kind != ActionRec::Kind::Init)
      continue;
    for (const auto& b : t) {
      if (b.kind != ActionRec::Kind::Synchronized && b.kind != ActionRec::Kind::Init)
        continue;
      if (a.id == b.id) continue;
      if (sim_detail::induced_rb_pair(t, a, b)) out.insert(a.event.id, b.event.id);
    }
  }
  return out;
}

/// All abstract executions induced by the trace: the induced history and rb,
/// ar ranging over the total completions of rb.
inline std::vector<AbstractExecution> induced_executions(const Trace& t,
                                                         std::size_t cap) {
  History h = induced_history(t);
  PairSet rb = induced_rb(t);
  std::vector<AbstractExecution> out;
  detail::linear_extensions(h.ids(), rb, [&](const std::vector<EventId>& ar) {
    if (out.size() >= cap) throw EnumerationOverflow(cap);
    out.emplace_back(h, rb, ar);
  });
  return out;
}

/// Seeded random straight-line program over the spec's shape menu.
inline Program random_program(const OpSpec& spec, std::mt19937_64& rng,
                              std::size_t num_replicas, std::size_t max_events) {
  std::vector<Event> menu = spec.shape_menu({"x", "y"});
  Program p;
  std::size_t total = 1 + rng() % max_events;
  for (std::size_t i = 0; i < total; ++i) {
    ReplicaId r = "r" + std::to_string(rng() % num_replicas);
    Event e = menu[rng() % menu.size()];
    p.replicas[r].push_back(e);
  }
  p.normalize();
  return p;
}

struct AvailabilityReport {
  bool available = true;
  std::size_t runs = 0;
  bool length_bound_ok = true;
  std::string first_failure;
};

/// Drives each program under each scheduler, asserting at every state that no
/// replica with pending invocations is stuck on receives, that runs terminate,
/// and that traces stay within 3x the program length.
inline AvailabilityReport check_availability(const StorageImpl& impl,
                                             const std::vector<Program>& programs,
                                             const std::vector<Scheduler>& scheds) {
  AvailabilityReport report;
  for (const auto& p : programs) {
    for (const auto& s : scheds) {
      ++report.runs;
      try {
        Trace t = run(p, impl, s);
        std::size_t actions = t.size() - 1;  // discount the init action
        if (actions > 3 * p.total_events()) {
          report.length_bound_ok = false;
          report.first_failure = "trace of " + std::to_string(actions) +
                                 " actions exceeds 3x program length under " + s.str();
          return report;
        }
      } catch (const WaitingReplica& w) {
        report.available = false;
        report.first_failure = std::string(w.what()) + " under " + s.str();
        return report;
      }
    }
  }
  return report;
}

struct ImplValidityReport {
  bool all_valid = true;
  std::size_t runs = 0;
  std::string first_failure;
};

/// Every trace must induce at least one execution valid w.r.t. (m, spec).
inline ImplValidityReport check_impl_validity(const StorageImpl& impl,
                                              const ConsistencyModel& m,
                                              const OpSpec& spec,
                                              const std::vector<Program>& programs,
                                              const std::vector<Scheduler>& scheds,
                                              std::size_t cap = 200000) {
  ImplValidityReport report;
  for (const auto& p : programs) {
    for (const auto& s : scheds) {
      ++report.runs;
      Trace t = run(p, impl, s);
      bool some_valid = false;
      for (const auto& xe : induced_executions(t, cap))
        if (check_exec(m, spec, xe).valid) {
          some_valid = true;
          break;
        }
      if (!some_valid) {
        report.all_valid = false;
        report.first_failure =
            "no induced execution valid under (" + m.name + ", " + spec.name() +
            ") for a trace under " + s.str();
        return report;
      }
    }
  }
  return report;
}

}  // namespace afc
