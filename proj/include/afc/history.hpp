#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "afc/event.hpp"
#include "afc/relation.hpp"

namespace afc {

/// Outcome of a well-formedness check. Violations are data, not faults.
struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
};

/// A finite set of events with session order and a per-object write-read
/// relation. The session order is stored as per-replica sequences (the init
/// event precedes everything); wr is stored in its inverse, total-function
/// form wr_x^{-1}: reader -> set of writers.
class History {
 public:
  History() { add_event(make_init({})); }

  explicit History(const std::map<ObjectId, Value>& init_values) {
    add_event(make_init(init_values));
  }

  /// Appends `e` at the end of its replica's session.
  void add_event(const Event& e) {
    if (index_.count(e.id))
      throw std::invalid_argument("duplicate event id: " + e.id);
    index_[e.id] = events_.size();
    events_.push_back(e);
    if (!e.is_init) sessions_[e.replica].push_back(e.id);
  }

  void set_wr(const ObjectId& x, const EventId& reader, std::set<EventId> writers) {
    if (writers.empty())
      wr_inv_[x].erase(reader);
    else
      wr_inv_[x][reader] = std::move(writers);
  }

  void set_init_value(const ObjectId& x, const Value& v) {
    events_[0].wval[x] = v;
    if (!events_[0].accesses(x)) events_[0].objs.push_back(x);
  }

  const Event& init() const { return events_[0]; }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  bool has_event(const EventId& id) const { return index_.count(id) > 0; }

  const Event& event(const EventId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown event: " + id);
    return events_[it->second];
  }

  Event& mutable_event(const EventId& id) {
    return events_[index_.at(id)];
  }

  const std::map<ReplicaId, std::vector<EventId>>& sessions() const { return sessions_; }

  /// wr_x^{-1}(reader); empty set means the event does not read x.
  std::set<EventId> wr_writers(const ObjectId& x, const EventId& reader) const {
    auto xit = wr_inv_.find(x);
    if (xit == wr_inv_.end()) return {};
    auto rit = xit->second.find(reader);
    if (rit == xit->second.end()) return {};
    return rit->second;
  }

  bool reads(const ObjectId& x, const EventId& reader) const {
    return !wr_writers(x, reader).empty();
  }

  const std::map<ObjectId, std::map<EventId, std::set<EventId>>>& wr() const {
    return wr_inv_;
  }

  /// Session order: init precedes every other event; two non-init events are
  /// ordered iff they share a replica, in session sequence order.
  bool so(const EventId& a, const EventId& b) const {
    if (a == b) return false;
    const Event& ea = event(a);
    const Event& eb = event(b);
    if (ea.is_init) return !eb.is_init;
    if (eb.is_init) return false;
    if (ea.replica != eb.replica) return false;
    const auto& sess = sessions_.at(ea.replica);
    auto pa = std::find(sess.begin(), sess.end(), a);
    auto pb = std::find(sess.begin(), sess.end(), b);
    return pa < pb;
  }

  /// Pairwise extension of wr: (w, r) in wr iff w is read by r on some object.
  bool wr_pair(const EventId& w, const EventId& r) const {
    for (const auto& [x, readers] : wr_inv_) {
      auto it = readers.find(r);
      if (it != readers.end() && it->second.count(w)) return true;
    }
    return false;
  }

  PairSet so_pairs() const {
    PairSet out;
    for (std::size_t i = 0; i < events_.size(); ++i)
      for (std::size_t j = 0; j < events_.size(); ++j)
        if (i != j && so(events_[i].id, events_[j].id))
          out.insert(events_[i].id, events_[j].id);
    return out;
  }

  PairSet wr_pairs() const {
    PairSet out;
    for (const auto& [x, readers] : wr_inv_)
      for (const auto& [r, ws] : readers)
        for (const auto& w : ws) out.insert(w, r);
    return out;
  }

  /// All objects mentioned by any event (accessed, written, or read).
  std::set<ObjectId> objects() const {
    std::set<ObjectId> out;
    for (const auto& e : events_) {
      out.insert(e.objs.begin(), e.objs.end());
      for (const auto& [x, _] : e.wval) out.insert(x);
    }
    for (const auto& [x, _] : wr_inv_) out.insert(x);
    return out;
  }

  std::vector<EventId> ids() const {
    std::vector<EventId> out;
    for (const auto& e : events_) out.push_back(e.id);
    return out;
  }

 private:
  std::vector<Event> events_;  // [0] is init
  std::map<EventId, std::size_t> index_;
  std::map<ReplicaId, std::vector<EventId>> sessions_;
  std::map<ObjectId, std::map<EventId, std::set<EventId>>> wr_inv_;
};

/// Checks every clause of the history definition and reports each violation
/// with the offending events.
inline ValidationReport validate_history(const History& h) {
  ValidationReport report;

  // wr edges must mention known events, never read into init, and every
  // recorded writer must actually write the object.
  for (const auto& [x, readers] : h.wr()) {
    for (const auto& [r, ws] : readers) {
      if (!h.has_event(r)) {
        report.fail("wr_" + x + " names unknown reader " + r);
        continue;
      }
      if (r == kInitId && !ws.empty())
        report.fail("wr_" + x + "^{-1}(init) must be empty");
      for (const auto& w : ws) {
        if (!h.has_event(w)) {
          report.fail("wr_" + x + " names unknown writer " + w);
          continue;
        }
        if (!h.event(w).writes(x))
          report.fail("wr_" + x + ": writer " + w + " has no written value at " + x);
      }
    }
  }

  // so U wr acyclic (pairwise extension of wr).
  PairSet edges = h.so_pairs().united(h.wr_pairs());
  PairSet closure = edges.plus();
  bool cyclic = false;
  for (const auto& e : h.events())
    if (closure.contains(e.id, e.id)) cyclic = true;
  if (cyclic) report.fail("so ∪ wr cyclic");

  return report;
}

}  // namespace afc
