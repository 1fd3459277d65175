#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixppl {

// Where in a source file something came from. Lines and columns are 1-based.
struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ErrorCode {
  // load-time errors (CLI exit code 2)
  io_error,
  lex_error,
  parse_error,
  resolve_error,
  type_error,
  static_cycle,
  weight_sum,
  bad_evidence,
  bad_query,
  precondition,

  // run-time inference errors (CLI exit code 3)
  dynamic_cycle,
  object_cap,
  invalid_params,
  eval_error,
  zero_total_weight,
  degeneracy,
  unsupported,
  bound_exceeded,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::lex_error: return "lex_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::resolve_error: return "resolve_error";
    case ErrorCode::type_error: return "type_error";
    case ErrorCode::static_cycle: return "static_cycle";
    case ErrorCode::weight_sum: return "weight_sum";
    case ErrorCode::bad_evidence: return "bad_evidence";
    case ErrorCode::bad_query: return "bad_query";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::dynamic_cycle: return "dynamic_cycle";
    case ErrorCode::object_cap: return "object_cap";
    case ErrorCode::invalid_params: return "invalid_params";
    case ErrorCode::eval_error: return "eval_error";
    case ErrorCode::zero_total_weight: return "zero_total_weight";
    case ErrorCode::degeneracy: return "degeneracy";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::bound_exceeded: return "bound_exceeded";
  }
  return "error";
}

// True for errors raised while loading/validating a model, false for errors
// raised while running inference.
inline bool is_load_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error:
    case ErrorCode::lex_error:
    case ErrorCode::parse_error:
    case ErrorCode::resolve_error:
    case ErrorCode::type_error:
    case ErrorCode::static_cycle:
    case ErrorCode::weight_sum:
    case ErrorCode::bad_evidence:
    case ErrorCode::bad_query:
    case ErrorCode::precondition:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, SourcePos pos)
      : std::runtime_error(format_at(message, pos)), code_(code), pos_(pos) {}

  ErrorCode code() const { return code_; }
  SourcePos pos() const { return pos_; }

 private:
  static std::string format_at(const std::string& message, SourcePos pos) {
    return message + " at line " + std::to_string(pos.line) + ", column " +
           std::to_string(pos.column);
  }

  ErrorCode code_;
  SourcePos pos_{};
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

[[noreturn]] inline void fail(ErrorCode code, std::string message,
                              SourcePos pos) {
  throw Error(code, std::move(message), pos);
}

}  // namespace mixppl
