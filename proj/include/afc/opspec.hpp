#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "afc/formula.hpp"

namespace afc {

/// Declared layering of a read specification: which partial order stratifies
/// its selections and how many top layers it may return (0 = unbounded).
struct LayerDecl {
  enum class Order { Ar, RbPlus };
  Order order = Order::Ar;
  std::size_t bound = 1;  // 0 means infinity
  bool unbounded() const { return bound == 0; }
};

/// A generalized operation specification: which event shapes exist, which
/// writers a reader selects from its context (rspec), the value it computes
/// from them (extract), and the value it writes, possibly conditioned on the
/// value read (wspec).
class OpSpec {
 public:
  virtual ~OpSpec() = default;

  const std::string& name() const { return name_; }
  bool allows_readwrites() const { return allows_readwrites_; }
  bool allows_conditional() const { return allows_conditional_; }
  bool allows_multiobject() const { return allows_multiobject_; }
  const LayerDecl& layer() const { return layer_; }

  /// Universe membership; a diagnostic for events outside it.
  virtual std::optional<std::string> shape_error(const Event& e) const = 0;

  /// Whether the event's shape reads object x (its rspec can be nonempty).
  virtual bool reads_shape(const Event& e, const ObjectId& x) const = 0;

  /// Whether the event's shape writes unconditionally (wspec total for it).
  virtual bool unconditional_write_shape(const Event& e) const = 0;

  virtual std::set<EventId> rspec(const Event& e, const ObjectId& x,
                                  const Context& c) const = 0;

  virtual std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const = 0;

  virtual std::optional<Value> wspec(const Event& e, const ObjectId& x,
                                     const std::optional<Value>& read) const = 0;

  /// Initial value of an object (what init writes unless a file overrides it).
  virtual Value initial_value(const ObjectId& x) const {
    (void)x;
    return Value::integer(0);
  }

  /// Canonical small shapes over the given objects, for enumeration.
  virtual std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const = 0;

  // Shape factories for program construction. Written values default to 1
  // so generated programs are reproducible.
  virtual std::optional<Event> write_shape(const ObjectId& x, long long v) const = 0;
  virtual std::optional<Event> read_shape(const ObjectId& x) const = 0;
  virtual std::optional<Event> readwrite_shape(const ObjectId& x, long long v) const {
    (void)x;
    (void)v;
    return std::nullopt;
  }
  /// A conditional multi-object read-write over `domain` meant to write
  /// exactly `writeset`, given the value currently visible at the pivot.
  virtual std::optional<Event> cond_readwrite_shape(const std::set<ObjectId>& domain,
                                                    const std::set<ObjectId>& writeset,
                                                    const Value& pivot_value) const {
    (void)domain;
    (void)writeset;
    (void)pivot_value;
    return std::nullopt;
  }

  virtual bool supports_corrector() const { return false; }

 protected:
  OpSpec(std::string name, bool rw, bool cond, bool multi, LayerDecl layer)
      : name_(std::move(name)),
        allows_readwrites_(rw),
        allows_conditional_(cond),
        allows_multiobject_(multi),
        layer_(layer) {}

  std::string name_;
  bool allows_readwrites_;
  bool allows_conditional_;
  bool allows_multiobject_;
  LayerDecl layer_;
};

using OpSpecPtr = std::shared_ptr<const OpSpec>;

/// rspec applied to the model-computed context of `e`.
inline std::set<EventId> rspec_exec(const OpSpec& spec, const ConsistencyModel& m,
                                    const ObjectId& x, const AbstractExecution& xe,
                                    const EventId& e, ModelEvaluator* ev = nullptr) {
  Context c = context_of(m, x, xe, e, ev);
  return spec.rspec(xe.event(e), x, c);
}

/// extract applied to the selected writers, paired with their stored values.
inline std::optional<Value> extract_exec(const OpSpec& spec, const ConsistencyModel& m,
                                         const ObjectId& x, const AbstractExecution& xe,
                                         const EventId& e, ModelEvaluator* ev = nullptr) {
  std::set<EventId> selected = rspec_exec(spec, m, x, xe, e, ev);
  std::vector<std::pair<EventId, Value>> pairs;
  for (const auto& id : xe.ar_order()) {
    if (!selected.count(id)) continue;
    auto v = xe.event(id).written(x);
    if (!v) return std::nullopt;  // selected writers always carry a value at x
    pairs.emplace_back(id, *v);
  }
  return spec.extract(xe.event(e), x, pairs);
}

/// wspec applied to the extracted value; constant for non-reading writers.
inline std::optional<Value> wspec_exec(const OpSpec& spec, const ConsistencyModel& m,
                                       const ObjectId& x, const AbstractExecution& xe,
                                       const EventId& e, ModelEvaluator* ev = nullptr) {
  const Event& ev_e = xe.event(e);
  if (ev_e.is_init) return ev_e.written(x);
  return spec.wspec(ev_e, x, extract_exec(spec, m, x, xe, e, ev));
}

}  // namespace afc
