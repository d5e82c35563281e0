#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace afc {

/// A finite binary relation over event identifiers, materialized as a pair set.
/// All relation-expression evaluation bottoms out here; desk-scale sizes make
/// the explicit representation exact and cheap.
class PairSet {
 public:
  using Pair = std::pair<std::string, std::string>;

  PairSet() = default;
  explicit PairSet(std::set<Pair> pairs) : pairs_(std::move(pairs)) {}

  bool contains(const std::string& a, const std::string& b) const {
    return pairs_.count({a, b}) > 0;
  }
  void insert(const std::string& a, const std::string& b) { pairs_.insert({a, b}); }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  const std::set<Pair>& pairs() const { return pairs_; }

  PairSet united(const PairSet& other) const {
    PairSet out = *this;
    out.pairs_.insert(other.pairs_.begin(), other.pairs_.end());
    return out;
  }

  PairSet composed(const PairSet& other) const {
    PairSet out;
    for (const auto& [a, b] : pairs_)
      for (const auto& [c, d] : other.pairs_)
        if (b == c) out.insert(a, d);
    return out;
  }

  /// Transitive closure by fixpoint iteration.
  PairSet plus() const {
    PairSet out = *this;
    for (;;) {
      PairSet next = out.united(out.composed(*this));
      if (next.size() == out.size()) return out;
      out = std::move(next);
    }
  }

  bool subset_of(const PairSet& other) const {
    for (const auto& p : pairs_)
      if (!other.pairs_.count(p)) return false;
    return true;
  }

  bool irreflexive() const {
    for (const auto& [a, b] : pairs_)
      if (a == b) return false;
    return true;
  }

  bool asymmetric() const {
    for (const auto& [a, b] : pairs_)
      if (a != b && pairs_.count({b, a})) return false;
    return true;
  }

  friend bool operator==(const PairSet& a, const PairSet& b) {
    return a.pairs_ == b.pairs_;
  }

 private:
  std::set<Pair> pairs_;
};

/// Identity relation over a carrier set.
inline PairSet identity_over(const std::vector<std::string>& ids) {
  PairSet out;
  for (const auto& id : ids) out.insert(id, id);
  return out;
}

}  // namespace afc
