#pragma once

#include <algorithm>

#include "afc/opspec.hpp"

namespace afc {

namespace detail {

inline Event single_obj_event(std::string op, const ObjectId& x,
                              std::vector<Value> value_args = {}) {
  Event e;
  e.op = std::move(op);
  e.objs = {x};
  e.args = std::move(value_args);
  return e;
}

inline Event multi_obj_event(std::string op, const std::set<ObjectId>& xs,
                             std::vector<Value> value_args = {}) {
  Event e;
  e.op = std::move(op);
  e.objs.assign(xs.begin(), xs.end());
  e.args = std::move(value_args);
  return e;
}

inline std::optional<std::string> expect_args(const Event& e, std::size_t n) {
  if (e.args.size() != n)
    return "event " + e.id + ": " + e.op + " takes " + std::to_string(n) +
           " value argument(s)";
  return std::nullopt;
}

inline std::optional<std::string> expect_single_object(const Event& e) {
  if (e.objs.size() != 1)
    return "event " + e.id + ": " + e.op + " accesses exactly one object";
  return std::nullopt;
}

/// Last-writer-wins selection: the ar-maximal event of a nonempty context.
inline std::set<EventId> lww(const Context& c) {
  auto top = c.ar_max();
  if (!top) return {};
  return {*top};
}

}  // namespace detail

/// Key-value store with PUT, GET, FAA and CAS operations.
class FaacasSpec : public OpSpec {
 public:
  FaacasSpec()
      : OpSpec("faacas", /*rw=*/true, /*cond=*/true, /*multi=*/false,
               {LayerDecl::Order::Ar, 1}) {}

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == "PUT" || e.op == "FAA") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 1);
    }
    if (e.op == "GET") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 0);
    }
    if (e.op == "CAS") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 2);
    }
    return "event " + e.id + ": operation " + e.op + " outside faacas";
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return (e.op == "GET" || e.op == "FAA" || e.op == "CAS") && e.accesses(x);
  }

  bool unconditional_write_shape(const Event& e) const override {
    return e.op == "PUT" || e.op == "FAA";
  }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    return detail::lww(c);
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x) || pairs.size() != 1) return std::nullopt;
    return pairs[0].second;
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>& read) const override {
    if (!e.accesses(x)) return std::nullopt;
    if (e.op == "PUT") return e.args[0];
    if (e.op == "FAA") {
      if (!read || !read->is_int()) return std::nullopt;
      return Value::integer(read->as_int() + e.args[0].as_int());
    }
    if (e.op == "CAS") {
      if (read && *read == e.args[0]) return e.args[1];
      return std::nullopt;
    }
    return std::nullopt;
  }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      out.push_back(detail::single_obj_event("PUT", x, {Value::integer(1)}));
      out.push_back(detail::single_obj_event("GET", x));
      out.push_back(detail::single_obj_event("FAA", x, {Value::integer(1)}));
      out.push_back(detail::single_obj_event("CAS", x,
                                             {Value::integer(0), Value::integer(2)}));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId& x, long long v) const override {
    return detail::single_obj_event("PUT", x, {Value::integer(v)});
  }
  std::optional<Event> read_shape(const ObjectId& x) const override {
    return detail::single_obj_event("GET", x);
  }
  std::optional<Event> readwrite_shape(const ObjectId& x, long long v) const override {
    return detail::single_obj_event("FAA", x, {Value::integer(v)});
  }
  std::optional<Event> cond_readwrite_shape(const std::set<ObjectId>& domain,
                                            const std::set<ObjectId>& writeset,
                                            const Value& pivot_value) const override {
    if (domain.size() != 1) return std::nullopt;
    const ObjectId& x = *domain.begin();
    long long cur = pivot_value.is_int() ? pivot_value.as_int() : 0;
    if (writeset.count(x))
      return detail::single_obj_event("CAS", x,
                                      {pivot_value, Value::integer(cur + 1)});
    return detail::single_obj_event(
        "CAS", x, {Value::integer(cur + 1), Value::integer(cur + 2)});
  }

  bool supports_corrector() const override { return true; }
};

/// Plain last-writer-wins key-value store (PUT and GET only).
class PutGetSpec : public OpSpec {
 public:
  PutGetSpec() : PutGetSpec("putget", "PUT", "GET") {}

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == write_op_) {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 1);
    }
    if (e.op == read_op_) {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 0);
    }
    return "event " + e.id + ": operation " + e.op + " outside " + name_;
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return e.op == read_op_ && e.accesses(x);
  }
  bool unconditional_write_shape(const Event& e) const override {
    return e.op == write_op_;
  }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    return detail::lww(c);
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x) || pairs.size() != 1) return std::nullopt;
    return pairs[0].second;
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>&) const override {
    if (e.op == write_op_ && e.accesses(x)) return e.args[0];
    return std::nullopt;
  }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      out.push_back(detail::single_obj_event(write_op_, x, {Value::integer(1)}));
      out.push_back(detail::single_obj_event(read_op_, x));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId& x, long long v) const override {
    return detail::single_obj_event(write_op_, x, {Value::integer(v)});
  }
  std::optional<Event> read_shape(const ObjectId& x) const override {
    return detail::single_obj_event(read_op_, x);
  }

 protected:
  PutGetSpec(std::string name, std::string write_op, std::string read_op)
      : OpSpec(std::move(name), false, false, false, {LayerDecl::Order::Ar, 1}),
        write_op_(std::move(write_op)),
        read_op_(std::move(read_op)) {}

  std::string write_op_;
  std::string read_op_;
};

/// Grow-only set with ADD and CONTAINS; presence is encoded by the written
/// value (initially 0, i.e. absent).
class AddContainsSpec : public PutGetSpec {
 public:
  AddContainsSpec() : PutGetSpec("addcontains", "ADD", "CONTAINS") {}
};

/// Multi-value key-value store: GET returns the set of values written by the
/// causally maximal puts.
class KmvSpec : public OpSpec {
 public:
  KmvSpec()
      : OpSpec("kmv", false, false, false, {LayerDecl::Order::RbPlus, 1}) {}

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == "PUT") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 1);
    }
    if (e.op == "GET") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 0);
    }
    return "event " + e.id + ": operation " + e.op + " outside kmv";
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return e.op == "GET" && e.accesses(x);
  }
  bool unconditional_write_shape(const Event& e) const override {
    return e.op == "PUT";
  }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    return c.rb_maximal();
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x)) return std::nullopt;
    std::vector<Value> vals;
    for (const auto& [_, v] : pairs) vals.push_back(v);
    return Value::set(std::move(vals));
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>&) const override {
    if (e.op == "PUT" && e.accesses(x)) return e.args[0];
    return std::nullopt;
  }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      out.push_back(detail::single_obj_event("PUT", x, {Value::integer(1)}));
      out.push_back(detail::single_obj_event("GET", x));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId& x, long long v) const override {
    return detail::single_obj_event("PUT", x, {Value::integer(v)});
  }
  std::optional<Event> read_shape(const ObjectId& x) const override {
    return detail::single_obj_event("GET", x);
  }
};

/// Distributed counter: INC bumps, RD counts the visible increments.
class CounterSpec : public OpSpec {
 public:
  CounterSpec()
      : OpSpec("counter", false, false, false, {LayerDecl::Order::Ar, 0}) {}

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == "INC" || e.op == "RD") {
      if (auto err = detail::expect_single_object(e)) return err;
      return detail::expect_args(e, 0);
    }
    return "event " + e.id + ": operation " + e.op + " outside counter";
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return e.op == "RD" && e.accesses(x);
  }
  bool unconditional_write_shape(const Event& e) const override {
    return e.op == "INC";
  }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    std::set<EventId> out;
    for (const auto& f : c.events) out.insert(f.id);
    return out;
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x)) return std::nullopt;
    return Value::integer(static_cast<long long>(pairs.size()) - 1);
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>&) const override {
    // The written 1 is a dummy marking that the increment took place.
    if (e.op == "INC" && e.accesses(x)) return Value::integer(1);
    return std::nullopt;
  }

  Value initial_value(const ObjectId&) const override { return Value::integer(1); }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      out.push_back(detail::single_obj_event("INC", x));
      out.push_back(detail::single_obj_event("RD", x));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId& x, long long) const override {
    return detail::single_obj_event("INC", x);
  }
  std::optional<Event> read_shape(const ObjectId& x) const override {
    return detail::single_obj_event("RD", x);
  }
};

/// Insert-if-absent / delete-if-present over object sets, last-writer-wins;
/// absence is the tombstone value.
class InsDelSpec : public OpSpec {
 public:
  InsDelSpec()
      : OpSpec("insdel", true, true, true, {LayerDecl::Order::Ar, 1}) {}

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == "InsAbs") {
      if (e.objs.empty()) return "event " + e.id + ": InsAbs needs objects";
      if (auto err = detail::expect_args(e, 1)) return err;
      if (e.args[0].is_tomb())
        return "event " + e.id + ": InsAbs of the tombstone is undefined";
      return std::nullopt;
    }
    if (e.op == "DelPre") {
      if (e.objs.empty()) return "event " + e.id + ": DelPre needs objects";
      return detail::expect_args(e, 0);
    }
    return "event " + e.id + ": operation " + e.op + " outside insdel";
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return (e.op == "InsAbs" || e.op == "DelPre") && e.accesses(x);
  }
  bool unconditional_write_shape(const Event&) const override { return false; }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    return detail::lww(c);
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x) || pairs.size() != 1) return std::nullopt;
    return pairs[0].second;
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>& read) const override {
    if (!e.accesses(x)) return std::nullopt;
    if (e.op == "InsAbs") {
      if (read && read->is_tomb()) return e.args[0];
      return std::nullopt;
    }
    if (e.op == "DelPre") {
      if (read && !read->is_tomb()) return Value::tomb();
      return std::nullopt;
    }
    return std::nullopt;
  }

  Value initial_value(const ObjectId&) const override { return Value::tomb(); }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      out.push_back(detail::multi_obj_event("InsAbs", {x}, {Value::integer(1)}));
      out.push_back(detail::multi_obj_event("DelPre", {x}));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId&, long long) const override {
    return std::nullopt;  // all writes are conditional
  }
  std::optional<Event> read_shape(const ObjectId&) const override {
    return std::nullopt;
  }
  std::optional<Event> cond_readwrite_shape(const std::set<ObjectId>& domain,
                                            const std::set<ObjectId>&,
                                            const Value& pivot_value) const override {
    if (pivot_value.is_tomb())
      return detail::multi_obj_event("InsAbs", domain, {Value::integer(1)});
    return detail::multi_obj_event("DelPre", domain);
  }

  bool supports_corrector() const override { return true; }
};

/// Non-transactional SQL over row identifiers with a closed predicate/update
/// language. Predicates are either object-membership masks or a single field
/// comparison against a constant; field predicates reject tombstones.
class SimpleSqlSpec : public OpSpec {
 public:
  SimpleSqlSpec()
      : OpSpec("simple_sql", true, true, true, {LayerDecl::Order::Ar, 1}) {}

  static bool predicate(const Event& e, const ObjectId& x, const Value& v) {
    if (!e.pred_objects.empty()) {
      auto it = e.pred_objects.find(x);
      return it != e.pred_objects.end() && it->second;
    }
    if (e.pred_field) {
      if (v.kind() != Value::Kind::Row) return false;
      const Value* f = v.field(e.pred_field->first);
      if (!f) return e.pred_field_op == "ne";
      bool eq = *f == e.pred_field->second;
      return e.pred_field_op == "ne" ? !eq : eq;
    }
    return !v.is_tomb();
  }

  std::optional<std::string> shape_error(const Event& e) const override {
    if (e.is_init) return std::nullopt;
    if (e.op == "INSERT") {
      if (e.insert_rows.empty())
        return "event " + e.id + ": INSERT needs rows";
      return std::nullopt;
    }
    if (e.op == "SELECT" || e.op == "UPSERT" || e.op == "DELETE") {
      if (e.objs.empty()) return "event " + e.id + ": " + e.op + " needs a domain";
      return std::nullopt;
    }
    return "event " + e.id + ": operation " + e.op + " outside simple_sql";
  }

  bool reads_shape(const Event& e, const ObjectId& x) const override {
    return (e.op == "SELECT" || e.op == "UPSERT" || e.op == "DELETE") &&
           e.accesses(x);
  }
  bool unconditional_write_shape(const Event& e) const override {
    return e.op == "INSERT";
  }

  std::set<EventId> rspec(const Event& e, const ObjectId& x,
                          const Context& c) const override {
    if (!reads_shape(e, x)) return {};
    return detail::lww(c);
  }

  std::optional<Value> extract(
      const Event& e, const ObjectId& x,
      const std::vector<std::pair<EventId, Value>>& pairs) const override {
    if (!reads_shape(e, x) || pairs.size() != 1) return std::nullopt;
    if (!predicate(e, x, pairs[0].second)) return std::nullopt;
    return pairs[0].second;
  }

  std::optional<Value> wspec(const Event& e, const ObjectId& x,
                             const std::optional<Value>& read) const override {
    if (e.op == "INSERT") {
      auto it = e.insert_rows.find(x);
      if (it == e.insert_rows.end()) return std::nullopt;
      return it->second;
    }
    if (!e.accesses(x)) return std::nullopt;
    if (e.op == "UPSERT") {
      if (!read) return std::nullopt;
      if (e.update_set.empty()) return *read;  // identity update
      std::map<std::string, Value> fields;
      if (read->kind() == Value::Kind::Row)
        for (const auto& [k, v] : read->fields()) fields[k] = v;
      for (const auto& [k, v] : e.update_set) fields[k] = v;
      return Value::row(std::move(fields));
    }
    if (e.op == "DELETE") {
      if (read && !read->is_tomb()) return Value::tomb();
      return std::nullopt;
    }
    return std::nullopt;
  }

  Value initial_value(const ObjectId&) const override { return Value::tomb(); }

  std::vector<Event> shape_menu(const std::vector<ObjectId>& objs) const override {
    std::vector<Event> out;
    for (const auto& x : objs) {
      Event ins;
      ins.op = "INSERT";
      ins.objs = {x};
      ins.insert_rows[x] = Value::row({{"f", Value::integer(1)}});
      out.push_back(ins);
      out.push_back(detail::single_obj_event("SELECT", x));
      out.push_back(detail::single_obj_event("DELETE", x));
    }
    return out;
  }

  std::optional<Event> write_shape(const ObjectId& x, long long v) const override {
    Event ins;
    ins.op = "INSERT";
    ins.objs = {x};
    ins.insert_rows[x] = Value::row({{"f", Value::integer(v)}});
    return ins;
  }
  std::optional<Event> read_shape(const ObjectId& x) const override {
    return detail::single_obj_event("SELECT", x);
  }
  std::optional<Event> readwrite_shape(const ObjectId& x, long long) const override {
    // Identity upsert over a membership predicate writes back what it reads.
    Event up = detail::single_obj_event("UPSERT", x);
    up.pred_objects[x] = true;
    return up;
  }
  std::optional<Event> cond_readwrite_shape(const std::set<ObjectId>& domain,
                                            const std::set<ObjectId>& writeset,
                                            const Value&) const override {
    Event up;
    up.op = "UPSERT";
    up.objs.assign(domain.begin(), domain.end());
    for (const auto& d : domain) up.pred_objects[d] = writeset.count(d) > 0;
    return up;
  }

  bool supports_corrector() const override { return true; }
};

/// Registry of the built-in operation specifications.
inline OpSpecPtr builtin_opspec(const std::string& name) {
  if (name == "faacas") return std::make_shared<FaacasSpec>();
  if (name == "putget") return std::make_shared<PutGetSpec>();
  if (name == "addcontains") return std::make_shared<AddContainsSpec>();
  if (name == "kmv") return std::make_shared<KmvSpec>();
  if (name == "counter") return std::make_shared<CounterSpec>();
  if (name == "insdel") return std::make_shared<InsDelSpec>();
  if (name == "simple_sql") return std::make_shared<SimpleSqlSpec>();
  throw std::invalid_argument("unknown operation specification: " + name);
}

}  // namespace afc
