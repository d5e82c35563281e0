#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "afc/execution.hpp"
#include "afc/relation.hpp"

namespace afc {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A relation expression over the base relations id, so, wr, rb, ar with
/// union, composition, option, transitive closure and reflexive closure.
class RelExpr {
 public:
  enum class Kind { Id, So, Wr, Rb, Ar, Union, Compose, Opt, Plus, Star };

  RelExpr() : kind_(Kind::Id) {}
  explicit RelExpr(Kind leaf) : kind_(leaf) {}

  static RelExpr leaf(Kind k) { return RelExpr(k); }
  static RelExpr unite(RelExpr a, RelExpr b) { return node(Kind::Union, {a, b}); }
  static RelExpr seq(RelExpr a, RelExpr b) { return node(Kind::Compose, {a, b}); }
  static RelExpr opt(RelExpr a) { return node(Kind::Opt, {a}); }
  static RelExpr plus(RelExpr a) { return node(Kind::Plus, {a}); }
  static RelExpr star(RelExpr a) { return node(Kind::Star, {a}); }

  Kind kind() const { return kind_; }
  const std::vector<RelExpr>& kids() const { return kids_; }

  bool is_leaf() const {
    return kind_ == Kind::Id || kind_ == Kind::So || kind_ == Kind::Wr ||
           kind_ == Kind::Rb || kind_ == Kind::Ar;
  }

  bool contains_leaf(Kind k) const {
    if (kind_ == k) return true;
    for (const auto& c : kids_)
      if (c.contains_leaf(k)) return true;
    return false;
  }

  friend bool operator==(const RelExpr& a, const RelExpr& b) {
    return a.kind_ == b.kind_ && a.kids_ == b.kids_;
  }
  friend bool operator<(const RelExpr& a, const RelExpr& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.kids_ < b.kids_;
  }

  std::string str() const {
    switch (kind_) {
      case Kind::Id: return "id";
      case Kind::So: return "so";
      case Kind::Wr: return "wr";
      case Kind::Rb: return "rb";
      case Kind::Ar: return "ar";
      case Kind::Union:
        return wrap(kids_[0], Kind::Union, false) + "|" + wrap(kids_[1], Kind::Union, true);
      case Kind::Compose:
        return wrap(kids_[0], Kind::Compose, false) + ";" + wrap(kids_[1], Kind::Compose, true);
      case Kind::Opt: return postfix("?");
      case Kind::Plus: return postfix("+");
      case Kind::Star: return postfix("*");
    }
    return "?";
  }

  /// Parses the textual grammar: union `|` binds loosest, composition `;`
  /// tighter, postfix `? + *` tightest; parentheses group.
  static RelExpr parse(const std::string& text) {
    Parser p{text, 0};
    RelExpr out = p.parse_union();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input in relation: " + text);
    return out;
  }

 private:
  static RelExpr node(Kind k, std::vector<RelExpr> kids) {
    RelExpr out;
    out.kind_ = k;
    out.kids_ = std::move(kids);
    return out;
  }

  static int prec(Kind k) {
    switch (k) {
      case Kind::Union: return 0;
      case Kind::Compose: return 1;
      default: return 2;
    }
  }

  // Right operands of the same binary kind keep their parentheses so that
  // parse(str()) reproduces the tree exactly.
  static std::string wrap(const RelExpr& child, Kind parent, bool right) {
    bool need = prec(child.kind_) < prec(parent) ||
                (right && child.kind_ == parent);
    return need ? "(" + child.str() + ")" : child.str();
  }

  std::string postfix(const std::string& op) const {
    const RelExpr& c = kids_[0];
    bool need = !c.is_leaf();
    return (need ? "(" + c.str() + ")" : c.str()) + op;
  }

  struct Parser {
    const std::string& text;
    std::size_t pos;

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    RelExpr parse_union() {
      RelExpr out = parse_seq();
      while (eat('|')) out = RelExpr::unite(out, parse_seq());
      return out;
    }
    RelExpr parse_seq() {
      RelExpr out = parse_postfix();
      while (eat(';')) out = RelExpr::seq(out, parse_postfix());
      return out;
    }
    RelExpr parse_postfix() {
      RelExpr out = parse_atom();
      for (;;) {
        if (eat('?')) out = RelExpr::opt(out);
        else if (eat('+')) out = RelExpr::plus(out);
        else if (eat('*')) out = RelExpr::star(out);
        else return out;
      }
    }
    RelExpr parse_atom() {
      skip_ws();
      if (eat('(')) {
        RelExpr out = parse_union();
        if (!eat(')')) throw ParseError("missing ')' in relation: " + text);
        return out;
      }
      std::string word;
      while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos])))
        word += text[pos++];
      if (word == "id") return RelExpr::leaf(Kind::Id);
      if (word == "so") return RelExpr::leaf(Kind::So);
      if (word == "wr") return RelExpr::leaf(Kind::Wr);
      if (word == "rb") return RelExpr::leaf(Kind::Rb);
      if (word == "ar") return RelExpr::leaf(Kind::Ar);
      throw ParseError("unknown relation name '" + word + "' in: " + text);
    }
  };

  Kind kind_;
  std::vector<RelExpr> kids_;
};

/// Materializes the base relations of an execution once, then combines them
/// per expression node. Results are memoized per expression text.
class RelEvaluator {
 public:
  explicit RelEvaluator(const AbstractExecution& xe) : xe_(&xe) {
    ids_ = xe.history().ids();
    base_[RelExpr::Kind::Id] = identity_over(ids_);
    base_[RelExpr::Kind::So] = xe.history().so_pairs();
    base_[RelExpr::Kind::Wr] = xe.history().wr_pairs();
    base_[RelExpr::Kind::Rb] = xe.rb();
    base_[RelExpr::Kind::Ar] = xe.ar_pairs();
  }

  const PairSet& materialize(const RelExpr& e) {
    auto key = e.str();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    PairSet out = compute(e);
    return cache_.emplace(std::move(key), std::move(out)).first->second;
  }

  const AbstractExecution& execution() const { return *xe_; }

 private:
  PairSet compute(const RelExpr& e) {
    using K = RelExpr::Kind;
    if (e.is_leaf()) return base_.at(e.kind());
    switch (e.kind()) {
      case K::Union:
        return materialize(e.kids()[0]).united(materialize(e.kids()[1]));
      case K::Compose:
        return materialize(e.kids()[0]).composed(materialize(e.kids()[1]));
      case K::Opt:
        return materialize(e.kids()[0]).united(base_.at(K::Id));
      case K::Plus:
        return materialize(e.kids()[0]).plus();
      case K::Star:
        return materialize(e.kids()[0]).plus().united(base_.at(K::Id));
      default:
        throw std::logic_error("unreachable relation kind");
    }
  }

  const AbstractExecution* xe_;
  std::vector<EventId> ids_;
  std::map<RelExpr::Kind, PairSet> base_;
  std::map<std::string, PairSet> cache_;
};

/// Whether (a, b) belongs to the relation denoted by `r` in `xe`.
inline bool eval_rel(const RelExpr& r, const AbstractExecution& xe, const EventId& a,
                     const EventId& b) {
  RelEvaluator ev(xe);
  return ev.materialize(r).contains(a, b);
}

}  // namespace afc
