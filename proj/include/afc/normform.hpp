#pragma once

#include "afc/builtin_models.hpp"
#include "afc/searchgen.hpp"

namespace afc {

// Bounded normal-form machinery: unfolding composite visibility formulas into
// simple ones, bounded vacuity search, conflict strengthening, causal
// suffixes, and the arbitration-freeness classifier. Exact normal forms may
// be infinite; everything here is explicitly bounded and reports its bounds.

struct UnfoldResult {
  std::vector<VisibilityFormula> formulas;
  bool truncated = false;
};

namespace normform_detail {

using LeafSeq = std::vector<RelExpr::Kind>;

struct SeqSet {
  std::set<LeafSeq> seqs;
  bool truncated = false;
};

inline SeqSet concat_product(const SeqSet& a, const SeqSet& b) {
  SeqSet out;
  out.truncated = a.truncated || b.truncated;
  for (const auto& s : a.seqs)
    for (const auto& t : b.seqs) {
      LeafSeq joined = s;
      joined.insert(joined.end(), t.begin(), t.end());
      out.seqs.insert(joined);
    }
  return out;
}

/// The sigma unfolding of a relation expression into base-leaf sequences.
/// Transitive base relations collapse their own closures (ar+ = ar, so+ = so),
/// which is what keeps e.g. the Prefix unfolding finite.
inline SeqSet sigma(const RelExpr& e, std::size_t depth) {
  using K = RelExpr::Kind;
  SeqSet out;
  switch (e.kind()) {
    case K::Id:
      out.seqs.insert({});
      return out;
    case K::So:
    case K::Wr:
    case K::Rb:
    case K::Ar:
      out.seqs.insert({e.kind()});
      return out;
    case K::Union: {
      SeqSet a = sigma(e.kids()[0], depth);
      SeqSet b = sigma(e.kids()[1], depth);
      a.seqs.insert(b.seqs.begin(), b.seqs.end());
      a.truncated = a.truncated || b.truncated;
      return a;
    }
    case K::Compose:
      return concat_product(sigma(e.kids()[0], depth), sigma(e.kids()[1], depth));
    case K::Opt: {
      SeqSet a = sigma(e.kids()[0], depth);
      a.seqs.insert({});
      return a;
    }
    case K::Plus:
    case K::Star: {
      SeqSet body = sigma(e.kids()[0], depth);
      SeqSet acc;
      if (body.seqs.size() == 1) {
        const LeafSeq& only = *body.seqs.begin();
        if (only.size() == 1 && (only[0] == K::Ar || only[0] == K::So)) {
          // so and ar are transitive, so one step already denotes the closure.
          acc.seqs.insert(only);
          if (e.kind() == K::Star) acc.seqs.insert({});
          acc.truncated = body.truncated;
          return acc;
        }
      }
      SeqSet power = body;
      acc = body;
      for (std::size_t k = 2; k <= depth; ++k) {
        power = concat_product(power, body);
        acc.seqs.insert(power.seqs.begin(), power.seqs.end());
      }
      acc.truncated = true;
      if (e.kind() == K::Star) acc.seqs.insert({});
      return acc;
    }
  }
  return out;
}

inline std::vector<ConflictConstraint> remap_conflicts(
    const VisibilityFormula& v, const std::vector<std::size_t>& new_index) {
  std::vector<ConflictConstraint> out;
  for (const auto& c : v.conflicts) {
    ConflictConstraint nc{c.kind, {}};
    for (std::size_t i : c.members) nc.members.insert(new_index[i]);
    if (!nc.members.empty()) out.push_back(nc);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace normform_detail

/// Unfolds a formula into the set of simple formulas it denotes, expanding
/// each closure up to `depth` compositions. Conflict constraints are
/// re-indexed onto the flattened step positions (id collapses slots).
inline UnfoldResult unfold_simple(const VisibilityFormula& v, std::size_t depth) {
  using namespace normform_detail;
  UnfoldResult out;

  std::vector<SeqSet> per_step;
  for (const auto& s : v.steps) {
    per_step.push_back(sigma(s, depth));
    out.truncated = out.truncated || per_step.back().truncated;
  }

  std::vector<LeafSeq> chosen(per_step.size());
  std::set<VisibilityFormula> dedup;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == per_step.size()) {
      std::vector<RelExpr> steps;
      std::vector<std::size_t> new_index(v.length() + 1, 0);
      for (std::size_t j = 0; j < chosen.size(); ++j) {
        for (auto k : chosen[j]) steps.push_back(RelExpr::leaf(k));
        new_index[j + 1] = steps.size();
      }
      if (steps.empty()) return;  // every step took the id branch
      VisibilityFormula sf;
      sf.steps = std::move(steps);
      sf.conflicts = remap_conflicts(v, new_index);
      sf.name = v.name + "#" + std::to_string(dedup.size());
      if (dedup.insert(sf).second) out.formulas.push_back(sf);
      return;
    }
    for (const auto& seq : per_step[i].seqs) {
      chosen[i] = seq;
      rec(i + 1);
    }
  };
  rec(0);
  std::sort(out.formulas.begin(), out.formulas.end());
  for (std::size_t i = 0; i < out.formulas.size(); ++i)
    out.formulas[i].name = v.name + "#" + std::to_string(i);
  return out;
}

inline UnfoldResult unfold_model(const ConsistencyModel& m, std::size_t depth) {
  UnfoldResult out;
  std::set<VisibilityFormula> dedup;
  for (const auto& v : m.formulas) {
    UnfoldResult one = unfold_simple(v, depth);
    out.truncated = out.truncated || one.truncated;
    for (auto& f : one.formulas)
      if (dedup.insert(f).second) out.formulas.push_back(std::move(f));
  }
  return out;
}

/// Searches executions of at most `size` events (including init) for one that
/// is valid w.r.t. (m, spec) but not (m \ {v}, spec) or vice versa. Finding
/// one refutes vacuity of v; finding none means "vacuous up to this bound".
inline std::optional<AbstractExecution> vacuity_witness(const VisibilityFormula& v,
                                                        const ConsistencyModel& m,
                                                        const OpSpec& spec,
                                                        std::size_t size) {
  bool member = false;
  for (const auto& f : m.formulas)
    if (f == v) member = true;
  if (!member) return std::nullopt;
  ConsistencyModel reduced = m.without(v);

  SearchOptions opt;
  opt.max_events = size > 0 ? size - 1 : 0;

  std::optional<AbstractExecution> found;
  for_each_derived_execution(spec, m, opt, [&](const AbstractExecution& xe) {
    if (!check_exec(reduced, spec, xe).valid) {
      found = xe;
      return false;
    }
    return true;
  });
  if (found) return found;
  for_each_derived_execution(spec, reduced, opt, [&](const AbstractExecution& xe) {
    if (!check_exec(m, spec, xe).valid) {
      found = xe;
      return false;
    }
    return true;
  });
  return found;
}

namespace normform_detail {

/// Whether every firing of v also fires v' on all free executions up to the
/// bound (v' strengthens v's conflicts; steps are shared).
inline bool strengthening_preserved(const VisibilityFormula& v,
                                    const VisibilityFormula& stronger,
                                    const OpSpec& spec, std::size_t size) {
  SearchOptions opt;
  opt.max_events = size > 0 ? size - 1 : 0;
  opt.deep_rb = true;
  bool preserved = true;
  for_each_free_execution(spec, opt, [&](const AbstractExecution& xe) {
    ModelEvaluator ev(xe);
    for (const auto& x : xe.history().objects()) {
      const PairSet& weak = ev.fired(v, x);
      if (weak.empty()) continue;
      const PairSet& strong = ev.fired(stronger, x);
      if (!weak.subset_of(strong)) {
        preserved = false;
        return false;
      }
    }
    return true;
  });
  return preserved;
}

}  // namespace normform_detail

/// Greedy conflict strengthening to a fixpoint: grow conflict sets (and drop
/// shared sets shadowed by on-x sets over the same members) while every
/// strengthening step preserves the formula's firings on all executions up to
/// the bound. The result is sound only up to that bound.
inline VisibilityFormula conflict_strengthen(const VisibilityFormula& simple,
                                             const OpSpec& spec, std::size_t size) {
  if (!simple.is_simple())
    throw std::invalid_argument("conflict_strengthen expects a simple formula");
  VisibilityFormula cur = simple;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t ci = 0; ci < cur.conflicts.size() && !changed; ++ci) {
      for (std::size_t slot = 0; slot <= cur.length() && !changed; ++slot) {
        if (cur.conflicts[ci].members.count(slot)) continue;
        VisibilityFormula cand = cur;
        cand.conflicts[ci].members.insert(slot);
        if (normform_detail::strengthening_preserved(cur, cand, spec, size)) {
          cur = cand;
          changed = true;
        }
      }
    }
    // Removal rule: a shared-object set duplicated by an on-x set is redundant.
    for (std::size_t ci = 0; ci < cur.conflicts.size() && !changed; ++ci) {
      if (cur.conflicts[ci].kind != ConflictConstraint::Kind::SharedObject) continue;
      for (const auto& other : cur.conflicts) {
        if (other.kind == ConflictConstraint::Kind::OnX &&
            other.members == cur.conflicts[ci].members) {
          cur.conflicts.erase(cur.conflicts.begin() + ci);
          changed = true;
          break;
        }
      }
    }
  }
  return cur;
}

/// The proper suffixes of a simple formula at each on-x slot index k >= 1:
/// steps k+1..n survive and conflict sets are projected onto the remaining
/// slots. With af_only, suffixes that still use arbitration are dropped.
inline std::vector<VisibilityFormula> causal_suffixes(const VisibilityFormula& simple,
                                                      bool af_only) {
  if (!simple.is_simple())
    throw std::invalid_argument("causal_suffixes expects a simple formula");
  std::set<std::size_t> onx;
  for (const auto& c : simple.conflicts)
    if (c.kind == ConflictConstraint::Kind::OnX)
      onx.insert(c.members.begin(), c.members.end());

  std::vector<VisibilityFormula> out;
  std::set<VisibilityFormula> dedup;
  for (std::size_t k : onx) {
    if (k == 0 || k >= simple.length()) continue;  // proper, nonempty suffixes
    VisibilityFormula s;
    s.name = simple.name + "-suffix" + std::to_string(k);
    s.steps.assign(simple.steps.begin() + static_cast<long>(k), simple.steps.end());
    for (const auto& c : simple.conflicts) {
      ConflictConstraint nc{c.kind, {}};
      for (std::size_t i : c.members)
        if (i >= k) nc.members.insert(i - k);
      if (!nc.members.empty()) s.conflicts.push_back(nc);
    }
    if (af_only && !s.arbitration_free()) continue;
    if (dedup.insert(s).second) out.push_back(s);
  }
  return out;
}

namespace normform_detail {

inline bool stronger_or_equal(RelExpr::Kind a, RelExpr::Kind b) {
  using K = RelExpr::Kind;
  if (a == b) return true;
  if (a == K::Ar) return true;
  if (a == K::Rb) return b == K::So || b == K::Wr;
  return false;
}

inline bool subsumes(const VisibilityFormula& stronger, const VisibilityFormula& s) {
  if (stronger.length() != s.length()) return false;
  for (std::size_t i = 0; i < s.length(); ++i)
    if (!stronger_or_equal(stronger.steps[i].kind(), s.steps[i].kind())) return false;
  return true;
}

}  // namespace normform_detail

struct ClosureReport {
  bool closed = true;
  // (formula, missing suffix) pairs
  std::vector<std::pair<std::string, std::string>> misses;
};

/// A set of simple formulas is closed under causal suffixes when every
/// arbitration-free suffix of each member is subsumed stepwise by some member
/// (rb is stronger than so and wr; ar is strongest).
inline ClosureReport check_causal_suffix_closure(
    const std::vector<VisibilityFormula>& formulas) {
  ClosureReport report;
  for (const auto& v : formulas) {
    for (const auto& s : causal_suffixes(v, /*af_only=*/true)) {
      bool covered = false;
      for (const auto& candidate : formulas)
        if (normform_detail::subsumes(candidate, s)) covered = true;
      if (!covered) {
        report.closed = false;
        report.misses.emplace_back(v.str(), s.str());
      }
    }
  }
  return report;
}

struct Classification {
  enum class Result { ArbitrationFree, NotArbitrationFree, Unknown };
  Result result = Result::Unknown;
  std::optional<VisibilityFormula> witness_formula;
  std::optional<AbstractExecution> witness_execution;
  std::size_t depth = 3;
  std::size_t size = 6;
  bool truncated = false;
  std::string note;

  std::string result_str() const {
    switch (result) {
      case Result::ArbitrationFree: return "arbitration_free";
      case Result::NotArbitrationFree: return "not_arbitration_free";
      default: return "unknown";
    }
  }
};

/// Three-valued arbitration-freeness: arbitration-using formulas that are
/// vacuous up to the bounds drop out; a surviving one with a simple
/// non-vacuous unfolding yields a counterexample witness; failing to pin a
/// simple witness leaves the verdict unknown with the bounds named.
inline Classification classify(const ConsistencyModel& m, const OpSpec& spec,
                               std::size_t depth, std::size_t size) {
  Classification out;
  out.depth = depth;
  out.size = size;

  UnfoldResult simple_model = unfold_model(m, depth);
  out.truncated = simple_model.truncated;
  ConsistencyModel unfolded{m.name + "-simple", simple_model.formulas};

  for (const auto& f : m.formulas) {
    if (f.arbitration_free()) continue;  // cannot contribute an ar unfolding
    auto composite_witness = vacuity_witness(f, m, spec, size);
    if (!composite_witness) continue;  // vacuous up to the bound

    for (const auto& s : unfold_simple(f, depth).formulas) {
      if (s.arbitration_free()) continue;
      auto w = vacuity_witness(s, unfolded, spec, size);
      if (w) {
        out.result = Classification::Result::NotArbitrationFree;
        out.witness_formula = s;
        out.witness_execution = w;
        return out;
      }
    }
    out.result = Classification::Result::Unknown;
    out.note = "formula " + f.name +
               " uses arbitration and is non-vacuous, but no simple witness was "
               "found at depth " +
               std::to_string(depth) + ", size " + std::to_string(size);
    return out;
  }

  out.result = Classification::Result::ArbitrationFree;
  return out;
}

}  // namespace afc
