#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "afc/history.hpp"

namespace afc {

/// Thrown when an enumeration would exceed its caller-supplied safety cap.
struct EnumerationOverflow : std::runtime_error {
  explicit EnumerationOverflow(std::size_t cap)
      : std::runtime_error("enumeration overflow: cap of " + std::to_string(cap) +
                           " results reached"),
        cap(cap) {}
  std::size_t cap;
};

/// A history enriched with a receive-before relation and a total arbitration
/// order (stored as the ar-ascending event sequence).
class AbstractExecution {
 public:
  AbstractExecution() = default;

  AbstractExecution(History h, PairSet rb, std::vector<EventId> ar_order)
      : h_(std::move(h)), rb_(std::move(rb)), ar_(std::move(ar_order)) {
    reindex();
  }

  const History& history() const { return h_; }
  History& mutable_history() { return h_; }
  const PairSet& rb() const { return rb_; }
  const std::vector<EventId>& ar_order() const { return ar_; }

  const Event& event(const EventId& id) const { return h_.event(id); }
  std::size_t size() const { return h_.size(); }

  bool in_rb(const EventId& a, const EventId& b) const { return rb_.contains(a, b); }

  bool ar_before(const EventId& a, const EventId& b) const {
    return arpos_.at(a) < arpos_.at(b);
  }

  std::size_t ar_position(const EventId& id) const { return arpos_.at(id); }

  PairSet ar_pairs() const {
    PairSet out;
    for (std::size_t i = 0; i < ar_.size(); ++i)
      for (std::size_t j = i + 1; j < ar_.size(); ++j) out.insert(ar_[i], ar_[j]);
    return out;
  }

  void reindex() {
    arpos_.clear();
    for (std::size_t i = 0; i < ar_.size(); ++i) arpos_[ar_[i]] = i;
  }

 private:
  History h_;
  PairSet rb_;
  std::vector<EventId> ar_;
  std::map<EventId, std::size_t> arpos_;
};

/// A finite event set with the rb/ar restrictions of its parent execution.
/// Events are held by value, ar-ascending, so contexts remain meaningful in
/// isolation (layer analysis, read specifications).
struct Context {
  std::vector<Event> events;  // ascending arbitration order
  PairSet rb;

  bool contains(const EventId& id) const {
    for (const auto& e : events)
      if (e.id == id) return true;
    return false;
  }

  const Event& event(const EventId& id) const {
    for (const auto& e : events)
      if (e.id == id) return e;
    throw std::out_of_range("context: unknown event " + id);
  }

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  std::optional<EventId> ar_max() const {
    if (events.empty()) return std::nullopt;
    return events.back().id;
  }

  bool ar_before(const EventId& a, const EventId& b) const {
    std::size_t pa = 0, pb = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].id == a) pa = i;
      if (events[i].id == b) pb = i;
    }
    return pa < pb;
  }

  /// Maximal elements w.r.t. the transitive closure of rb inside the context.
  std::set<EventId> rb_maximal() const {
    PairSet rbp = rb.plus();
    std::set<EventId> out;
    for (const auto& e : events) {
      bool dominated = false;
      for (const auto& f : events)
        if (f.id != e.id && rbp.contains(e.id, f.id)) dominated = true;
      if (!dominated) out.insert(e.id);
    }
    return out;
  }

  /// Restriction of the context to an event subset, preserving order.
  Context restricted(const std::set<EventId>& keep) const {
    Context out;
    for (const auto& e : events)
      if (keep.count(e.id)) out.events.push_back(e);
    for (const auto& [a, b] : rb.pairs())
      if (keep.count(a) && keep.count(b)) out.rb.insert(a, b);
    return out;
  }

  /// Appends `e` as the rb- and ar-maximum of the context.
  Context appended(const Event& e) const {
    Context out = *this;
    for (const auto& f : events) out.rb.insert(f.id, e.id);
    out.events.push_back(e);
    return out;
  }
};

/// Checks the defining clauses of an abstract execution: the rb;so* fixpoint,
/// the inclusion chain so U wr <= rb <= ar, and ar totality.
inline ValidationReport validate_execution(const AbstractExecution& xe) {
  ValidationReport report;
  const History& h = xe.history();

  if (!xe.rb().irreflexive()) report.fail("rb not irreflexive");
  if (!xe.rb().asymmetric()) report.fail("rb not asymmetric");

  // ar is a strict total order over exactly the history's events.
  {
    std::set<EventId> in_ar(xe.ar_order().begin(), xe.ar_order().end());
    if (in_ar.size() != xe.ar_order().size()) report.fail("ar sequence repeats an event");
    std::set<EventId> in_h;
    for (const auto& e : h.events()) in_h.insert(e.id);
    if (in_ar != in_h) report.fail("ar not total over the event set");
  }

  PairSet so = h.so_pairs();
  PairSet wr = h.wr_pairs();
  PairSet ar = xe.ar_pairs();

  if (!so.subset_of(xe.rb())) report.fail("so ⊄ rb");
  if (!wr.subset_of(xe.rb())) report.fail("wr ⊄ rb");
  if (!xe.rb().subset_of(ar)) report.fail("rb ⊄ ar");

  // rb = rb ; so*  <=>  one more so-composition step adds no pair.
  PairSet grown = xe.rb().united(xe.rb().composed(so));
  if (!(grown == xe.rb())) report.fail("rb ≠ rb ; so*");

  return report;
}

namespace detail {

inline void linear_extensions(const std::vector<EventId>& ids, const PairSet& edges,
                              const std::function<void(const std::vector<EventId>&)>& emit) {
  std::vector<EventId> order;
  std::set<EventId> used;
  std::function<void()> rec = [&]() {
    if (order.size() == ids.size()) {
      emit(order);
      return;
    }
    for (const auto& cand : ids) {
      if (used.count(cand)) continue;
      bool ready = true;
      for (const auto& other : ids)
        if (!used.count(other) && other != cand && edges.contains(other, cand))
          ready = false;
      if (!ready) continue;
      used.insert(cand);
      order.push_back(cand);
      rec();
      order.pop_back();
      used.erase(cand);
    }
  };
  rec();
}

}  // namespace detail

/// Yields every abstract execution of `h`: ar ranges over all topological
/// completions of so U wr, and rb over all relations between the so U wr
/// closure under `;so*` and ar. Throws EnumerationOverflow past `cap`.
inline std::vector<AbstractExecution> enumerate_extensions(const History& h,
                                                           std::size_t cap) {
  std::vector<AbstractExecution> out;
  PairSet so = h.so_pairs();
  PairSet base = so.united(h.wr_pairs());

  // Close the mandatory part under ;so* once; every rb must contain it.
  PairSet mandatory = base;
  for (;;) {
    PairSet next = mandatory.united(mandatory.composed(so));
    if (next == mandatory) break;
    mandatory = next;
  }

  detail::linear_extensions(h.ids(), base, [&](const std::vector<EventId>& ar) {
    // Optional pairs: ar pairs not already mandatory.
    std::vector<PairSet::Pair> optional;
    for (std::size_t i = 0; i < ar.size(); ++i)
      for (std::size_t j = i + 1; j < ar.size(); ++j)
        if (!mandatory.contains(ar[i], ar[j])) optional.push_back({ar[i], ar[j]});

    if (optional.size() > 20)
      throw EnumerationOverflow(cap);  // 2^optional would dwarf any sane cap

    for (std::size_t mask = 0; mask < (std::size_t{1} << optional.size()); ++mask) {
      PairSet rb = mandatory;
      for (std::size_t bit = 0; bit < optional.size(); ++bit)
        if (mask & (std::size_t{1} << bit))
          rb.insert(optional[bit].first, optional[bit].second);
      // rb ; so must stay inside rb.
      if (!rb.composed(so).subset_of(rb)) continue;
      if (out.size() >= cap) throw EnumerationOverflow(cap);
      out.emplace_back(h, rb, ar);
    }
  });
  return out;
}

}  // namespace afc
