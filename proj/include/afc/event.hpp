#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "afc/value.hpp"

namespace afc {

using EventId = std::string;
using ReplicaId = std::string;

/// Name of the distinguished initial event and of its operation.
inline const EventId kInitId = "init";
inline const std::string kInitOp = "INIT";

/// One operation invocation. The operation is a name plus typed arguments;
/// `args` holds the argument values in positional order (objects are encoded
/// as string values; SQL predicates/updates live in `pred` and `update`).
struct Event {
  EventId id;
  ReplicaId replica;
  std::string op;
  std::vector<Value> args;
  std::vector<ObjectId> objs;         // objects this event accesses
  std::map<ObjectId, Value> wval;     // values this event writes
  bool is_init = false;
  std::string meta;                   // opaque, never interpreted

  // simple-SQL payload: a closed predicate/update language, see builtin_opspecs.hpp
  std::map<ObjectId, bool> pred_objects;          // object-membership predicate
  std::optional<std::pair<std::string, Value>> pred_field;  // field op const
  std::string pred_field_op;                      // "eq" | "ne"
  std::map<std::string, Value> update_set;        // fields overwritten by UPSERT
  std::map<ObjectId, Value> insert_rows;          // rows written by INSERT

  bool writes(const ObjectId& x) const { return wval.count(x) > 0; }

  std::optional<Value> written(const ObjectId& x) const {
    auto it = wval.find(x);
    if (it == wval.end()) return std::nullopt;
    return it->second;
  }

  bool accesses(const ObjectId& x) const {
    for (const auto& o : objs)
      if (o == x) return true;
    return false;
  }

  std::string describe() const {
    std::string out = op + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ",";
      out += args[i].str();
    }
    out += ")";
    return out;
  }
};

/// Builds the distinguished initial event writing `values`.
inline Event make_init(const std::map<ObjectId, Value>& values) {
  Event e;
  e.id = kInitId;
  e.replica = "";
  e.op = kInitOp;
  e.is_init = true;
  e.wval = values;
  for (const auto& [x, _] : values) e.objs.push_back(x);
  return e;
}

}  // namespace afc
