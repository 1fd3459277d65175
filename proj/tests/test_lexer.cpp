#include <doctest.h>

#include "mixppl/lexer.hpp"

using namespace mixppl;

TEST_CASE("obs statement tokenizes into the expected kinds") {
  auto toks = tokenize("obs GPA(David) = 4;");
  std::vector<Tok> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<Tok>{Tok::kw_obs, Tok::ident, Tok::lparen,
                                  Tok::ident, Tok::rparen, Tok::assign,
                                  Tok::int_lit, Tok::semicolon,
                                  Tok::end_of_input});
  CHECK(toks[1].text == "GPA");
  CHECK(toks[3].text == "David");
  CHECK(toks[6].int_value == 4);
}

TEST_CASE("empty input yields only end-of-input") {
  auto toks = tokenize("");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].kind == Tok::end_of_input);
}

TEST_CASE("@0 is a single timestep token") {
  auto toks = tokenize("@0");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].kind == Tok::timestep_lit);
  CHECK(toks[0].int_value == 0);
}

TEST_CASE("comments are stripped and positions survive") {
  auto toks = tokenize("// header\nrandom // trailing\nReal");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].kind == Tok::kw_random);
  CHECK(toks[0].pos.line == 2);
  CHECK(toks[1].kind == Tok::ident);
  CHECK(toks[1].pos.line == 3);
}

TEST_CASE("illegal character reports line and column") {
  try {
    tokenize("random $x");
    FAIL("expected a lex error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::lex_error);
    CHECK(e.pos().line == 1);
    CHECK(e.pos().column == 8);
  }
}

TEST_CASE("number forms") {
  auto toks = tokenize("4 4.5 0.0001 1e3 7e-2");
  CHECK(toks[0].kind == Tok::int_lit);
  CHECK(toks[1].kind == Tok::real_lit);
  CHECK(toks[1].real_value == doctest::Approx(4.5));
  CHECK(toks[2].real_value == doctest::Approx(0.0001));
  CHECK(toks[3].kind == Tok::real_lit);
  CHECK(toks[3].real_value == doctest::Approx(1000.0));
  CHECK(toks[4].real_value == doctest::Approx(0.07));
}

TEST_CASE("operators and arrows") {
  auto toks = tokenize("-> - == = != <= >= < > ~ #");
  std::vector<Tok> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<Tok>{Tok::arrow, Tok::minus, Tok::eq, Tok::assign,
                                  Tok::neq, Tok::le, Tok::ge, Tok::lt, Tok::gt,
                                  Tok::tilde, Tok::hash, Tok::end_of_input});
}
