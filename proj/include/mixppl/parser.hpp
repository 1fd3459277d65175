#pragma once

#include <span>
#include <string_view>

#include "mixppl/ast.hpp"
#include "mixppl/lexer.hpp"

namespace mixppl {

// Parses a token stream into a model AST. Throws Error(parse_error) with an
// expected-token diagnostic and position on malformed input.
ModelAST parse_model(std::span<const Token> tokens);

// Convenience: tokenize + parse.
ModelAST parse_model_text(std::string_view text);

}  // namespace mixppl
