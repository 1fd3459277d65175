#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mixppl/errors.hpp"

namespace mixppl {

enum class Tok {
  // keywords
  kw_type,
  kw_distinct,
  kw_origin,
  kw_fixed,
  kw_random,
  kw_obs,
  kw_query,
  kw_if,
  kw_then,
  kw_else,
  kw_for,
  kw_true,
  kw_false,
  kw_null,

  ident,
  int_lit,
  real_lit,
  timestep_lit,  // @k

  lparen,
  rparen,
  lbrace,
  rbrace,
  lbracket,
  rbracket,
  comma,
  semicolon,
  hash,    // #
  tilde,   // ~
  arrow,   // ->
  assign,  // =
  eq,      // ==
  neq,     // !=
  lt,
  le,
  gt,
  ge,
  plus,
  minus,
  star,
  slash,

  end_of_input,
};

const char* tok_name(Tok t);

struct Token {
  Tok kind;
  std::string text;
  std::int64_t int_value = 0;
  double real_value = 0.0;
  SourcePos pos;
};

// Comments (`//` to end of line) are stripped; every token carries its
// source position. Throws Error(lex_error) on an illegal character.
std::vector<Token> tokenize(std::string_view text);

}  // namespace mixppl
