#pragma once

#include <fstream>

#include "afc/litmus.hpp"
#include "afc/normform.hpp"

#include "json.hpp"

namespace afc {

using Json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- values ----------------------------------------------------------------
// Integers and strings are plain JSON; tombstones {"t":"tomb"}, sets
// {"t":"set","v":[...]}, rows {"t":"row","v":{field: scalar}}.

inline Json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return v.as_int();
    case Value::Kind::Str: return v.as_str();
    case Value::Kind::Tomb: return Json{{"t", "tomb"}};
    case Value::Kind::Set: {
      Json arr = Json::array();
      for (const auto& m : v.members()) arr.push_back(value_to_json(m));
      return Json{{"t", "set"}, {"v", arr}};
    }
    case Value::Kind::Row: {
      Json obj = Json::object();
      for (const auto& [k, f] : v.fields()) obj[k] = value_to_json(f);
      return Json{{"t", "row"}, {"v", obj}};
    }
  }
  return nullptr;
}

inline Value value_from_json(const Json& j) {
  if (j.is_number_integer()) return Value::integer(j.get<long long>());
  if (j.is_string()) return Value::str(j.get<std::string>());
  if (j.is_object() && j.contains("t")) {
    std::string tag = j.at("t").get<std::string>();
    if (tag == "tomb") return Value::tomb();
    if (tag == "set") {
      std::vector<Value> members;
      for (const auto& m : j.at("v")) members.push_back(value_from_json(m));
      return Value::set(std::move(members));
    }
    if (tag == "row") {
      std::map<std::string, Value> fields;
      for (const auto& [k, f] : j.at("v").items()) fields[k] = value_from_json(f);
      return Value::row(std::move(fields));
    }
  }
  throw IoError("cannot decode value: " + j.dump());
}

// ---- events ----------------------------------------------------------------
// Single-object operations carry the object as args[0]; the multi-object
// set operations carry a list there. SQL payloads use dedicated keys.

inline Json event_to_json(const Event& e) {
  Json j;
  j["id"] = e.id;
  j["replica"] = e.replica;
  j["op"] = e.op;
  Json args = Json::array();
  if (e.op == "InsAbs" || e.op == "DelPre") {
    Json list = Json::array();
    for (const auto& x : e.objs) list.push_back(x);
    args.push_back(list);
  } else if (e.op == "SELECT" || e.op == "UPSERT" || e.op == "DELETE") {
    Json list = Json::array();
    for (const auto& x : e.objs) list.push_back(x);
    args.push_back(list);
  } else if (!e.is_init && e.op != "INSERT" && !e.objs.empty()) {
    args.push_back(e.objs.front());
  }
  for (const auto& v : e.args) args.push_back(value_to_json(v));
  j["args"] = args;
  if (!e.wval.empty()) {
    Json w = Json::object();
    for (const auto& [x, v] : e.wval) w[x] = value_to_json(v);
    j["wval"] = w;
  }
  if (!e.insert_rows.empty()) {
    Json rows = Json::object();
    for (const auto& [x, v] : e.insert_rows) rows[x] = value_to_json(v);
    j["rows"] = rows;
  }
  if (!e.pred_objects.empty()) {
    Json po = Json::object();
    for (const auto& [x, b] : e.pred_objects) po[x] = b;
    j["pred"] = Json{{"objects", po}};
  } else if (e.pred_field) {
    j["pred"] = Json{{"field", e.pred_field->first},
                     {"op", e.pred_field_op},
                     {"const", value_to_json(e.pred_field->second)}};
  }
  if (!e.update_set.empty()) {
    Json up = Json::object();
    for (const auto& [k, v] : e.update_set) up[k] = value_to_json(v);
    j["update"] = up;
  }
  if (!e.meta.empty()) j["meta"] = e.meta;
  return j;
}

inline Event event_from_json(const Json& j) {
  Event e;
  e.id = j.value("id", "");
  e.replica = j.value("replica", "");
  e.op = j.at("op").get<std::string>();
  e.meta = j.value("meta", "");
  Json args = j.value("args", Json::array());
  std::size_t value_start = 0;
  if (e.op == "INSERT") {
    if (!j.contains("rows")) throw IoError("INSERT event needs \"rows\"");
  } else if (!args.empty() && args[0].is_array()) {
    for (const auto& x : args[0]) e.objs.push_back(x.get<std::string>());
    value_start = 1;
  } else if (!args.empty() && args[0].is_string()) {
    e.objs.push_back(args[0].get<std::string>());
    value_start = 1;
  }
  for (std::size_t i = value_start; i < args.size(); ++i)
    e.args.push_back(value_from_json(args[i]));
  if (j.contains("wval"))
    for (const auto& [x, v] : j.at("wval").items()) {
      e.wval[x] = value_from_json(v);
      if (!e.accesses(x) && e.op == "INSERT") e.objs.push_back(x);
    }
  if (j.contains("rows"))
    for (const auto& [x, v] : j.at("rows").items()) {
      e.insert_rows[x] = value_from_json(v);
      if (!e.accesses(x)) e.objs.push_back(x);
    }
  if (j.contains("pred")) {
    const Json& p = j.at("pred");
    if (p.contains("objects")) {
      for (const auto& [x, b] : p.at("objects").items())
        e.pred_objects[x] = b.get<bool>();
    } else {
      e.pred_field = {p.at("field").get<std::string>(),
                      value_from_json(p.at("const"))};
      e.pred_field_op = p.value("op", "eq");
    }
  }
  if (j.contains("update"))
    for (const auto& [k, v] : j.at("update").items())
      e.update_set[k] = value_from_json(v);
  return e;
}

// ---- histories and executions ----------------------------------------------

inline Json history_to_json(const History& h) {
  Json j;
  Json objs = Json::array();
  for (const auto& x : h.objects()) objs.push_back(x);
  j["objects"] = objs;
  Json init_vals = Json::object();
  for (const auto& [x, v] : h.init().wval) init_vals[x] = value_to_json(v);
  j["init"] = Json{{"values", init_vals}};
  Json events = Json::array();
  for (const auto& e : h.events())
    if (!e.is_init) events.push_back(event_to_json(e));
  j["events"] = events;
  j["so_implicit"] = true;
  Json wr = Json::object();
  for (const auto& [x, readers] : h.wr()) {
    Json per = Json::object();
    for (const auto& [r, ws] : readers) {
      Json list = Json::array();
      for (const auto& w : ws) list.push_back(w);
      per[r] = list;
    }
    wr[x] = per;
  }
  j["wr"] = wr;
  return j;
}

inline History history_from_json(const Json& j) {
  std::map<ObjectId, Value> init_values;
  if (j.contains("init"))
    for (const auto& [x, v] : j.at("init").at("values").items())
      init_values[x] = value_from_json(v);
  if (j.contains("objects"))
    for (const auto& x : j.at("objects")) {
      ObjectId id = x.get<std::string>();
      if (!init_values.count(id)) init_values[id] = Value::integer(0);
    }
  History h(init_values);
  const Json events = j.value("events", Json::array());
  for (const auto& ej : events) h.add_event(event_from_json(ej));
  const Json wr = j.value("wr", Json::object());
  for (const auto& [x, readers] : wr.items())
    for (const auto& [r, ws] : readers.items()) {
      std::set<EventId> writers;
      for (const auto& w : ws) writers.insert(w.get<std::string>());
      h.set_wr(x, r, writers);
    }
  return h;
}

inline Json execution_to_json(const AbstractExecution& xe) {
  Json j = history_to_json(xe.history());
  Json rb = Json::array();
  for (const auto& [a, b] : xe.rb().pairs()) rb.push_back(Json::array({a, b}));
  j["rb"] = rb;
  Json ar = Json::array();
  for (const auto& id : xe.ar_order()) ar.push_back(id);
  j["ar"] = ar;
  return j;
}

inline AbstractExecution execution_from_json(const Json& j) {
  History h = history_from_json(j);
  if (!j.contains("ar")) throw IoError("execution needs an \"ar\" order");
  std::vector<EventId> ar;
  for (const auto& id : j.at("ar")) ar.push_back(id.get<std::string>());
  PairSet rb;
  if (j.contains("rb")) {
    for (const auto& p : j.at("rb")) rb.insert(p[0].get<std::string>(),
                                               p[1].get<std::string>());
  }
  // so and wr are always received-before; close under ;so*.
  PairSet so = h.so_pairs();
  rb = rb.united(so).united(h.wr_pairs());
  for (;;) {
    PairSet next = rb.united(rb.composed(so));
    if (next == rb) break;
    rb = next;
  }
  return AbstractExecution(std::move(h), std::move(rb), std::move(ar));
}

// ---- programs and traces -----------------------------------------------------

inline Json program_to_json(const Program& p) {
  Json replicas = Json::object();
  for (const auto& [r, session] : p.replicas) {
    Json list = Json::array();
    for (const auto& e : session) list.push_back(event_to_json(e));
    replicas[r] = list;
  }
  return Json{{"replicas", replicas}};
}

inline Program program_from_json(const Json& j) {
  Program p;
  for (const auto& [r, session] : j.at("replicas").items())
    for (const auto& ej : session) p.replicas[r].push_back(event_from_json(ej));
  p.normalize();
  return p;
}

inline Json trace_to_json(const Trace& t) {
  Json actions = Json::array();
  for (const auto& a : t) {
    Json aj;
    aj["kind"] = a.kind_str();
    aj["id"] = a.id;
    if (!a.replica.empty()) aj["replica"] = a.replica;
    if (a.kind == ActionRec::Kind::Init || a.kind == ActionRec::Kind::Synchronized) {
      aj["event"] = event_to_json(a.event);
      if (!a.wrdeps.empty()) {
        Json deps = Json::object();
        for (const auto& [x, ws] : a.wrdeps) {
          Json list = Json::array();
          for (const auto& w : ws) list.push_back(w);
          deps[x] = list;
        }
        aj["wrdeps"] = deps;
      }
    } else {
      aj["msg"] = a.msg_id;
      Json payload = Json::array();
      for (const auto& e : a.payload) payload.push_back(e);
      aj["payload"] = payload;
    }
    actions.push_back(aj);
  }
  return Json{{"actions", actions}};
}

// ---- verdicts, classifications, litmus ---------------------------------------

inline Json verdict_to_json(const Verdict& v, bool include_witness = true) {
  Json j;
  j["valid"] = v.valid;
  Json viols = Json::array();
  for (const auto& viol : v.violations)
    viols.push_back(Json{{"event", viol.event},
                         {"object", viol.object},
                         {"expected_wr", viol.expected_wr},
                         {"found_wr", viol.found_wr},
                         {"expected_wval", viol.expected_wval},
                         {"found_wval", viol.found_wval}});
  j["violations"] = viols;
  if (include_witness && v.witness) j["witness"] = execution_to_json(*v.witness);
  return j;
}

inline Json classification_to_json(const Classification& c) {
  Json j;
  j["result"] = c.result_str();
  if (c.witness_formula) j["witness_formula"] = c.witness_formula->str();
  if (c.witness_execution)
    j["witness_execution"] = execution_to_json(*c.witness_execution);
  j["bounds"] = Json{{"depth", c.depth}, {"size", c.size}};
  j["truncated"] = c.truncated;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline Json litmus_to_json(const GeneratedLitmus& g) {
  Json j;
  j["program"] = program_to_json(g.program);
  Json readers = Json::array();
  for (const auto& id : g.descriptor.expected_misreaders) readers.push_back(id);
  j["descriptor"] = Json{{"formula", g.descriptor.formula},
                         {"x0", g.descriptor.x0},
                         {"x1", g.descriptor.x1},
                         {"d_v", g.descriptor.d_v},
                         {"expected_misreaders", readers}};
  return j;
}

inline Json verification_to_json(const LitmusVerification& v) {
  Json j;
  j["violation_confirmed"] = v.violation_confirmed;
  j["availability_failure"] = v.availability_failure;
  j["branches"] = v.branches;
  j["invalid_branches"] = v.invalid_branches;
  j["notes"] = v.notes;
  return j;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw IoError("cannot parse " + path + ": " + ex.what());
  }
  return j;
}

}  // namespace afc
