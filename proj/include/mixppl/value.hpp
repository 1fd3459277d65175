#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mixppl {

// Distinguished integer-like type for @k literals and prev(t).
struct Timestep {
  int t = 0;
  friend bool operator==(Timestep a, Timestep b) { return a.t == b.t; }
  friend auto operator<=>(Timestep a, Timestep b) { return a.t <=> b.t; }
};

class Value;

// Identity of an object of a user-declared type. Distinct constants carry
// their name; generated objects carry (number statement, origin argument
// tuple, index i >= 1). Two refs are equal iff their provenance is equal.
struct ObjectCell {
  int type = -1;
  int number_stmt = -1;  // -1 for distinct constants
  int index = 0;         // constant ordinal, or generation index i >= 1
  std::vector<Value> origin_args;
  std::string name;  // distinct constants only
};

using ObjectRef = std::shared_ptr<const ObjectCell>;

class Value {
 public:
  enum class Kind : std::uint8_t { Null, Bool, Int, Real, Time, Object };

  Value() : data_(std::monostate{}) {}
  explicit Value(bool b) : data_(b) {}
  explicit Value(std::int64_t i) : data_(i) {}
  explicit Value(double r) : data_(r) {}
  explicit Value(Timestep t) : data_(t) {}
  explicit Value(ObjectRef o) : data_(std::move(o)) {}

  static Value null() { return Value(); }

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_null() const { return kind() == Kind::Null; }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_real() const { return kind() == Kind::Real; }
  bool is_time() const { return kind() == Kind::Time; }
  bool is_object() const { return kind() == Kind::Object; }
  bool is_numeric() const { return is_int() || is_real(); }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_real() const { return std::get<double>(data_); }
  Timestep as_time() const { return std::get<Timestep>(data_); }
  const ObjectRef& as_object() const { return std::get<ObjectRef>(data_); }

  // Int widens to Real; anything else must already be Real.
  double to_real() const {
    return is_int() ? static_cast<double>(as_int()) : as_real();
  }

  // Structural equality: kinds must match, objects compare by provenance.
  // This is the identity used for world keys.
  friend bool operator==(const Value& a, const Value& b);

  std::size_t hash() const;
  std::string str() const;

 private:
  std::variant<std::monostate, bool, std::int64_t, double, Timestep, ObjectRef>
      data_;
};

// Language-level equality for `==`, atom matching and evidence: numeric kinds
// compare by numeric value, null equals only null, objects by provenance.
// `tol` is the absolute atom tolerance (0 means exact float equality).
bool value_eq(const Value& a, const Value& b, double tol = 0.0);

bool object_eq(const ObjectRef& a, const ObjectRef& b);
std::string object_str(const ObjectRef& o);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace mixppl
