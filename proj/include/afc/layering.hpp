#pragma once

#include "afc/opspec.hpp"

namespace afc {

/// Layer of `e` inside a context: the size of the largest chain through `e`
/// containing no smaller elements and reaching a maximal element, i.e. the
/// longest ascending chain from `e` under the chosen order. Maximal elements
/// have layer 1.
inline std::size_t layer_of(const EventId& e, const Context& c,
                            LayerDecl::Order order) {
  if (order == LayerDecl::Order::Ar) {
    // Total order: the chain upward is everything after e.
    for (std::size_t i = 0; i < c.events.size(); ++i)
      if (c.events[i].id == e) return c.events.size() - i;
    throw std::out_of_range("layer_of: event not in context: " + e);
  }
  PairSet rbp = c.rb.plus();
  std::map<EventId, std::size_t> memo;
  std::function<std::size_t(const EventId&)> up = [&](const EventId& id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    std::size_t best = 1;
    for (const auto& f : c.events)
      if (f.id != id && rbp.contains(id, f.id)) best = std::max(best, 1 + up(f.id));
    memo[id] = best;
    return best;
  };
  if (!c.contains(e)) throw std::out_of_range("layer_of: event not in context: " + e);
  return up(e);
}

/// The set of context events with layer <= k (k = 0 meaning no bound).
inline std::set<EventId> layer_set(const Context& c, LayerDecl::Order order,
                                   std::size_t k) {
  std::set<EventId> out;
  for (const auto& e : c.events)
    if (k == 0 || layer_of(e.id, c, order) <= k) out.insert(e.id);
  return out;
}

struct LayerSample {
  ObjectId object;
  Context context;
  Event reader;
};

struct LayerReport {
  bool pass = true;
  std::string counterexample;  // description of the first failing sample
};

/// Verifies over a sample corpus that the spec's read selections are exactly
/// the top-k layer set of their context (or empty), under the declared order.
inline LayerReport check_maximally_layered(const OpSpec& spec,
                                           const std::vector<LayerSample>& samples) {
  LayerReport report;
  for (const auto& s : samples) {
    std::set<EventId> selected = spec.rspec(s.reader, s.object, s.context);
    if (selected.empty()) continue;
    std::set<EventId> expected =
        layer_set(s.context, spec.layer().order, spec.layer().bound);
    if (selected == expected) continue;
    report.pass = false;
    std::string got = "{", want = "{";
    for (const auto& id : selected) got += id + ",";
    for (const auto& id : expected) want += id + ",";
    report.counterexample = "reader " + s.reader.describe() + " on " + s.object +
                            ": rspec " + got + "} vs layer set " + want + "}";
    return report;
  }
  return report;
}

}  // namespace afc
