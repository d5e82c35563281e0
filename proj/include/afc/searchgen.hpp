#pragma once

#include <functional>

#include "afc/validity.hpp"

namespace afc {

// Bounded enumeration of small executions over a spec's event shapes, used by
// the vacuity / conflict-maximality searches. Two flavors:
//   - free executions: write-read assignments enumerated outright, written
//     values derived along the wr chains;
//   - derived executions: write-read and written values computed from a
//     consistency model so the result is valid w.r.t. it by construction.
// Both are bounded and canonical: two replicas, a fixed object universe, and
// shape menus; searches built on them are refutation-sound only.

struct SearchOptions {
  std::vector<ObjectId> objects{"x", "y"};
  std::size_t max_events = 5;  // excluding init
  bool deep_rb = false;        // also try rb = full arbitration prefix
};

namespace searchgen_detail {

inline std::vector<std::vector<int>> shape_tuples(std::size_t n, std::size_t menu) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  for (;;) {
    out.push_back(cur);
    std::size_t d = 0;
    while (d < n) {
      if (++cur[d] < static_cast<int>(menu)) break;
      cur[d++] = 0;
    }
    if (d == n) break;
  }
  if (n == 0) out = {{}};
  return out;
}

inline History base_history(const OpSpec& spec, const SearchOptions& opt,
                            const std::vector<Event>& menu,
                            const std::vector<int>& shapes, std::size_t split) {
  std::map<ObjectId, Value> init_vals;
  for (const auto& x : opt.objects) init_vals[x] = spec.initial_value(x);
  History h(init_vals);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    Event e = menu[shapes[i]];
    e.id = "e" + std::to_string(i);
    e.replica = i < split ? "r0" : "r1";
    h.add_event(e);
  }
  return h;
}

/// Derives wval along the wr chains (undefined where wspec is); returns false
/// on a wr cycle.
inline bool derive_wvals(History& h, const OpSpec& spec) {
  std::set<EventId> done{kInitId};
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& ev : h.events()) {
      if (done.count(ev.id)) continue;
      bool ready = true;
      for (const auto& x : ev.objs)
        for (const auto& w : h.wr_writers(x, ev.id))
          if (!done.count(w)) ready = false;
      if (!ready) continue;
      Event& e = h.mutable_event(ev.id);
      e.wval.clear();
      for (const auto& x : e.objs) {
        std::vector<std::pair<EventId, Value>> pairs;
        bool writer_undefined = false;
        for (const auto& w : h.wr_writers(x, e.id)) {
          auto v = h.event(w).written(x);
          if (!v) writer_undefined = true;
          else pairs.emplace_back(w, *v);
        }
        if (writer_undefined) continue;
        auto out = spec.wspec(e, x, spec.extract(e, x, pairs));
        if (out) e.wval[x] = *out;
      }
      done.insert(e.id);
      progress = true;
    }
  }
  return done.size() == h.size();
}

}  // namespace searchgen_detail

/// Enumerates free executions: all wr assignments (empty or a single writer
/// per read), rb minimal (or also maximal with deep_rb), all ar completions.
/// The callback returns false to stop the enumeration.
inline void for_each_free_execution(
    const OpSpec& spec, const SearchOptions& opt,
    const std::function<bool(const AbstractExecution&)>& cb) {
  using namespace searchgen_detail;
  std::vector<Event> menu = spec.shape_menu(opt.objects);

  for (std::size_t n = 0; n <= opt.max_events; ++n) {
    for (std::size_t split = (n + 1) / 2; split <= n; ++split) {
      for (const auto& shapes : shape_tuples(n, menu.size())) {
        History skeleton = base_history(spec, opt, menu, shapes, split);

        // Reader slots: (event, object) pairs that may carry a wr edge.
        std::vector<std::pair<EventId, ObjectId>> readers;
        for (const auto& e : skeleton.events()) {
          if (e.is_init) continue;
          for (const auto& x : e.objs)
            if (spec.reads_shape(e, x)) readers.emplace_back(e.id, x);
        }
        // Candidate writers per reader: any other event accessing the object,
        // plus init, plus "reads nothing".
        std::vector<std::vector<std::optional<EventId>>> cands(readers.size());
        for (std::size_t i = 0; i < readers.size(); ++i) {
          cands[i].push_back(std::nullopt);
          cands[i].push_back(kInitId);
          for (const auto& e : skeleton.events())
            if (!e.is_init && e.id != readers[i].first && e.accesses(readers[i].second))
              cands[i].push_back(e.id);
        }

        std::vector<std::size_t> pick(readers.size(), 0);
        for (;;) {
          History h = skeleton;
          for (std::size_t i = 0; i < readers.size(); ++i) {
            const auto& c = cands[i][pick[i]];
            if (c) h.set_wr(readers[i].second, readers[i].first, {*c});
          }
          if (validate_history(h).ok && derive_wvals(h, spec)) {
            // Drop assignments whose chosen writer ended up writing nothing.
            bool consistent = true;
            for (std::size_t i = 0; i < readers.size(); ++i) {
              const auto& c = cands[i][pick[i]];
              if (c && !h.event(*c).writes(readers[i].second)) consistent = false;
            }
            if (consistent) {
              PairSet so = h.so_pairs();
              PairSet minimal = so.united(h.wr_pairs());
              for (;;) {
                PairSet next = minimal.united(minimal.composed(so));
                if (next == minimal) break;
                minimal = next;
              }
              bool keep_going = true;
              detail::linear_extensions(h.ids(), minimal,
                                        [&](const std::vector<EventId>& ar) {
                if (!keep_going) return;
                AbstractExecution xe(h, minimal, ar);
                if (!cb(xe)) {
                  keep_going = false;
                  return;
                }
                if (opt.deep_rb) {
                  AbstractExecution full(h, xe.ar_pairs(), ar);
                  if (validate_execution(full).ok && !cb(full)) keep_going = false;
                }
              });
              if (!keep_going) return;
            }
          }
          std::size_t d = 0;
          while (d < pick.size()) {
            if (++pick[d] < cands[d].size()) break;
            pick[d++] = 0;
          }
          if (d == pick.size()) break;
        }
      }
    }
  }
}

/// Enumerates executions derived from a model: wr and wval are computed as
/// the model's read/write specifications dictate (fixpoint per event, then an
/// rb re-closure pass). Every emitted execution is valid w.r.t. (m, spec).
inline void for_each_derived_execution(
    const OpSpec& spec, const ConsistencyModel& m, const SearchOptions& opt,
    const std::function<bool(const AbstractExecution&)>& cb) {
  using namespace searchgen_detail;
  std::vector<Event> menu = spec.shape_menu(opt.objects);

  auto derive = [&](const History& skeleton, const std::vector<EventId>& ar,
                    bool full_rb) -> std::optional<AbstractExecution> {
    History h = skeleton;
    PairSet so = h.so_pairs();
    PairSet rb = so;
    AbstractExecution xe(h, rb, ar);
    if (full_rb) rb = xe.ar_pairs();

    for (int round = 0; round < 4; ++round) {
      bool changed = false;
      AbstractExecution cur(h, rb, ar);
      for (const auto& id : ar) {
        if (id == kInitId) continue;
        for (int pass = 0; pass < 2; ++pass) {
          ModelEvaluator ev(cur);
          const Event& e = cur.event(id);
          for (const auto& x : e.objs) {
            std::set<EventId> want = rspec_exec(spec, m, x, cur, id, &ev);
            std::optional<Value> val = wspec_exec(spec, m, x, cur, id, &ev);
            History& hh = cur.mutable_history();
            if (hh.wr_writers(x, id) != want) {
              hh.set_wr(x, id, want);
              changed = true;
            }
            Event& me = hh.mutable_event(id);
            auto cur_val = me.written(x);
            bool same = (!val && !cur_val) || (val && cur_val && *val == *cur_val);
            if (!same) {
              if (val) me.wval[x] = *val;
              else me.wval.erase(x);
              changed = true;
            }
          }
          cur = AbstractExecution(cur.history(), rb, ar);
        }
      }
      // Re-close rb over the derived wr and iterate until stable.
      PairSet next_rb = full_rb ? cur.ar_pairs()
                                : so.united(cur.history().wr_pairs());
      for (;;) {
        PairSet grown = next_rb.united(next_rb.composed(so));
        if (grown == next_rb) break;
        next_rb = grown;
      }
      h = cur.history();
      if (!(next_rb == rb)) {
        rb = next_rb;
        changed = true;
      }
      if (!changed) break;
    }

    AbstractExecution out(h, rb, ar);
    if (!validate_history(out.history()).ok) return std::nullopt;
    if (!validate_execution(out).ok) return std::nullopt;
    if (!check_exec(m, spec, out).valid) return std::nullopt;
    return out;
  };

  for (std::size_t n = 0; n <= opt.max_events; ++n) {
    for (std::size_t split = (n + 1) / 2; split <= n; ++split) {
      for (const auto& shapes : shape_tuples(n, menu.size())) {
        History skeleton = base_history(spec, opt, menu, shapes, split);
        PairSet so = skeleton.so_pairs();
        bool keep_going = true;
        detail::linear_extensions(skeleton.ids(), so,
                                  [&](const std::vector<EventId>& ar) {
          if (!keep_going) return;
          for (bool full_rb : opt.deep_rb ? std::vector<bool>{false, true}
                                          : std::vector<bool>{false}) {
            auto xe = derive(skeleton, ar, full_rb);
            if (xe && !cb(*xe)) {
              keep_going = false;
              return;
            }
          }
        });
        if (!keep_going) return;
      }
    }
  }
}

}  // namespace afc
