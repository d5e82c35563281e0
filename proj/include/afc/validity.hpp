#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "afc/builtin_opspecs.hpp"

namespace afc {

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Violation {
  EventId event;
  ObjectId object;
  std::string expected_wr;
  std::string found_wr;
  std::string expected_wval;
  std::string found_wval;
};

struct Verdict {
  bool valid = true;
  std::vector<Violation> violations;
  std::optional<AbstractExecution> witness;
};

namespace detail {

inline std::string idset_str(const std::set<EventId>& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& id : s) {
    if (!first) out += ",";
    first = false;
    out += id;
  }
  return out + "}";
}

inline std::string optval_str(const std::optional<Value>& v) {
  return v ? v->str() : "undef";
}

}  // namespace detail

/// Validity of an abstract execution against a storage specification: every
/// event's write-read set must equal the read specification applied to its
/// context, and its written values must match the write specification.
/// Undefined-on-both-sides counts as equal. Events are reported in ar order
/// and objects lexicographically.
inline Verdict check_exec(const ConsistencyModel& m, const OpSpec& spec,
                          const AbstractExecution& xe) {
  for (const auto& e : xe.history().events())
    if (auto err = spec.shape_error(e)) throw ShapeError(*err);

  Verdict verdict;
  ModelEvaluator ev(xe);
  std::set<ObjectId> objects = xe.history().objects();

  for (const auto& id : xe.ar_order()) {
    const Event& e = xe.event(id);
    for (const auto& x : objects) {
      std::set<EventId> expected_wr =
          e.is_init ? std::set<EventId>{} : rspec_exec(spec, m, x, xe, id, &ev);
      std::set<EventId> found_wr = xe.history().wr_writers(x, id);
      std::optional<Value> expected_wval = wspec_exec(spec, m, x, xe, id, &ev);
      std::optional<Value> found_wval = e.written(x);

      bool wr_ok = expected_wr == found_wr;
      bool wval_ok = (!expected_wval && !found_wval) ||
                     (expected_wval && found_wval && *expected_wval == *found_wval);
      if (wr_ok && wval_ok) continue;
      verdict.valid = false;
      verdict.violations.push_back({id, x, detail::idset_str(expected_wr),
                                    detail::idset_str(found_wr),
                                    detail::optval_str(expected_wval),
                                    detail::optval_str(found_wval)});
    }
  }
  return verdict;
}

/// A history is valid iff some abstract execution of it is; returns the first
/// valid extension as witness.
inline Verdict check_history(const ConsistencyModel& m, const OpSpec& spec,
                             const History& h, std::size_t cap) {
  Verdict last;
  for (const auto& xe : enumerate_extensions(h, cap)) {
    Verdict v = check_exec(m, spec, xe);
    if (v.valid) {
      v.witness = xe;
      return v;
    }
    last = std::move(v);
  }
  last.valid = false;
  return last;
}

/// Direct implementation of the basic (single-object, last-writer-wins)
/// validity definition: every read takes the ar-maximal write of its context
/// and writes according to wspec applied to the value read. Only meaningful
/// for single-object specs such as faacas and putget.
inline bool check_exec_basic_lww(const ConsistencyModel& m, const OpSpec& spec,
                                 const AbstractExecution& xe) {
  for (const auto& e : xe.history().events())
    if (auto err = spec.shape_error(e)) throw ShapeError(*err);

  ModelEvaluator ev(xe);
  std::set<ObjectId> objects = xe.history().objects();
  auto equal_opt = [](const std::optional<Value>& a, const std::optional<Value>& b) {
    return (!a && !b) || (a && b && *a == *b);
  };

  for (const auto& e : xe.history().events()) {
    if (e.is_init) continue;
    for (const auto& x : objects) {
      std::set<EventId> found = xe.history().wr_writers(x, e.id);
      if (spec.reads_shape(e, x)) {
        Context c = context_of(m, x, xe, e.id, &ev);
        if (c.empty()) {
          // No visible write to read; treat the maximal-write singleton as
          // empty, matching the generalized definition on empty contexts.
          if (!found.empty()) return false;
          if (e.written(x)) return false;
          continue;
        }
        EventId w = *c.ar_max();
        if (found != std::set<EventId>{w}) return false;
        std::optional<Value> read = xe.event(w).written(x);
        if (!equal_opt(e.written(x), spec.wspec(e, x, read))) return false;
      } else {
        if (!found.empty()) return false;
        std::optional<Value> expected =
            e.accesses(x) ? spec.wspec(e, x, std::nullopt) : std::nullopt;
        if (!equal_opt(e.written(x), expected)) return false;
      }
    }
  }
  return true;
}

}  // namespace afc
