#include "mixppl/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace mixppl {

namespace {

std::string real_str(double r) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), r);
  std::string s(buf, end);
  // keep reals distinguishable from integer literals
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

bool object_eq(const ObjectRef& a, const ObjectRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->type != b->type || a->number_stmt != b->number_stmt ||
      a->index != b->index)
    return false;
  if (a->number_stmt < 0) return a->name == b->name;
  if (a->origin_args.size() != b->origin_args.size()) return false;
  for (std::size_t i = 0; i < a->origin_args.size(); ++i)
    if (!(a->origin_args[i] == b->origin_args[i])) return false;
  return true;
}

std::string object_str(const ObjectRef& o) {
  if (!o) return "null";
  if (o->number_stmt < 0) return o->name;
  std::string s = o->name + "(";
  for (std::size_t i = 0; i < o->origin_args.size(); ++i) {
    if (i) s += ", ";
    s += o->origin_args[i].str();
  }
  s += ")[" + std::to_string(o->index) + "]";
  return s;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Null:
      return true;
    case Value::Kind::Bool:
      return a.as_bool() == b.as_bool();
    case Value::Kind::Int:
      return a.as_int() == b.as_int();
    case Value::Kind::Real:
      return a.as_real() == b.as_real();
    case Value::Kind::Time:
      return a.as_time() == b.as_time();
    case Value::Kind::Object:
      return object_eq(a.as_object(), b.as_object());
  }
  return false;
}

bool value_eq(const Value& a, const Value& b, double tol) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  if (a.is_numeric() && b.is_numeric()) {
    double x = a.to_real();
    double y = b.to_real();
    if (tol > 0.0) return std::fabs(x - y) <= tol;
    return x == y;
  }
  return a == b;
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(kind()) * 0x9e3779b97f4a7c15ULL;
  switch (kind()) {
    case Kind::Null:
      return h;
    case Kind::Bool:
      return hash_combine(h, as_bool() ? 1 : 2);
    case Kind::Int:
      return hash_combine(h, std::hash<std::int64_t>{}(as_int()));
    case Kind::Real:
      return hash_combine(h, std::hash<double>{}(as_real()));
    case Kind::Time:
      return hash_combine(h, std::hash<int>{}(as_time().t));
    case Kind::Object: {
      const ObjectRef& o = as_object();
      if (!o) return h;
      h = hash_combine(h, std::hash<int>{}(o->type));
      h = hash_combine(h, std::hash<int>{}(o->number_stmt));
      h = hash_combine(h, std::hash<int>{}(o->index));
      if (o->number_stmt < 0) {
        h = hash_combine(h, std::hash<std::string>{}(o->name));
      } else {
        for (const Value& v : o->origin_args) h = hash_combine(h, v.hash());
      }
      return h;
    }
  }
  return h;
}

std::string Value::str() const {
  switch (kind()) {
    case Kind::Null:
      return "null";
    case Kind::Bool:
      return as_bool() ? "true" : "false";
    case Kind::Int:
      return std::to_string(as_int());
    case Kind::Real:
      return real_str(as_real());
    case Kind::Time:
      return "@" + std::to_string(as_time().t);
    case Kind::Object:
      return object_str(as_object());
  }
  return "?";
}

}  // namespace mixppl
