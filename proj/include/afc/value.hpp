#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace afc {

/// An object (key) of the replicated store. Equality is exact string equality.
using ObjectId = std::string;

/// A storage value: integer, string, tombstone (absence marker), a duplicate-free
/// set of values, or a row mapping field names to scalar values.
class Value {
 public:
  enum class Kind { Int, Str, Tomb, Set, Row };

  Value() : kind_(Kind::Int), int_(0) {}

  static Value integer(long long v) {
    Value out;
    out.kind_ = Kind::Int;
    out.int_ = v;
    return out;
  }
  static Value str(std::string v) {
    Value out;
    out.kind_ = Kind::Str;
    out.str_ = std::move(v);
    return out;
  }
  static Value tomb() {
    Value out;
    out.kind_ = Kind::Tomb;
    return out;
  }
  static Value set(std::vector<Value> members) {
    Value out;
    out.kind_ = Kind::Set;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    out.elems_ = std::move(members);
    return out;
  }
  static Value row(std::map<std::string, Value> fields) {
    Value out;
    out.kind_ = Kind::Row;
    out.fields_.assign(fields.begin(), fields.end());
    return out;
  }

  Kind kind() const { return kind_; }
  bool is_tomb() const { return kind_ == Kind::Tomb; }
  bool is_int() const { return kind_ == Kind::Int; }

  long long as_int() const {
    require(Kind::Int);
    return int_;
  }
  const std::string& as_str() const {
    require(Kind::Str);
    return str_;
  }
  const std::vector<Value>& members() const {
    require(Kind::Set);
    return elems_;
  }
  const std::vector<std::pair<std::string, Value>>& fields() const {
    require(Kind::Row);
    return fields_;
  }

  /// Row field lookup; nullptr when the field is absent or this is not a row.
  const Value* field(const std::string& name) const {
    if (kind_ != Kind::Row) return nullptr;
    for (const auto& [k, v] : fields_)
      if (k == name) return &v;
    return nullptr;
  }

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind_ == b.kind_ && a.int_ == b.int_ && a.str_ == b.str_ &&
           a.elems_ == b.elems_ && a.fields_ == b.fields_;
  }
  friend bool operator<(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    if (a.int_ != b.int_) return a.int_ < b.int_;
    if (a.str_ != b.str_) return a.str_ < b.str_;
    if (a.elems_ != b.elems_) return a.elems_ < b.elems_;
    return a.fields_ < b.fields_;
  }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

 private:
  void require(Kind k) const {
    if (kind_ != k) throw std::logic_error("value kind mismatch: " + str());
  }
  void print(std::ostream& os) const {
    switch (kind_) {
      case Kind::Int: os << int_; break;
      case Kind::Str: os << '"' << str_ << '"'; break;
      case Kind::Tomb: os << "†"; break;
      case Kind::Set: {
        os << '{';
        bool first = true;
        for (const auto& m : elems_) {
          if (!first) os << ',';
          first = false;
          m.print(os);
        }
        os << '}';
        break;
      }
      case Kind::Row: {
        os << '(';
        bool first = true;
        for (const auto& [k, v] : fields_) {
          if (!first) os << ',';
          first = false;
          os << k << ':';
          v.print(os);
        }
        os << ')';
        break;
      }
    }
  }

  Kind kind_;
  long long int_ = 0;
  std::string str_;
  std::vector<Value> elems_;
  std::vector<std::pair<std::string, Value>> fields_;
};

}  // namespace afc
