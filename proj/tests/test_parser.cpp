#include <doctest.h>

#include "mixppl/parser.hpp"
#include "support/fixtures.hpp"

using namespace mixppl;

TEST_CASE("GPA variant parses with the expected statement counts") {
  ModelAST ast = parse_model_text(fixtures::kGpaVariant);
  CHECK(ast.type_decls.size() == 2);
  REQUIRE(ast.distinct_decls.size() == 1);
  CHECK(ast.distinct_decls[0].items.size() == 3);
  CHECK(ast.number_stmts.size() == 1);
  CHECK(ast.origin_decls.size() == 1);
  CHECK(ast.fixed_fns.empty());
  CHECK(ast.random_fns.size() == 2);
  CHECK(ast.obs_stmts.size() == 1);
  CHECK(ast.query_stmts.size() == 1);

  // `query Nationality(David) = USA;` reads as an equality query
  const Expr& q = ast.query_stmts[0].expr;
  CHECK(q.kind == ExprKind::binop);
  CHECK(q.op == BinOp::eq);
  CHECK(print_expr(q) == "Nationality(David) == USA");
}

TEST_CASE("scale variant parses with the expected statement counts") {
  ModelAST ast = parse_model_text(fixtures::kScaleVariant);
  CHECK(ast.fixed_fns.size() == 1);
  CHECK(ast.random_fns.size() == 3);
  CHECK(ast.obs_stmts.size() == 1);
  CHECK(ast.query_stmts.size() == 1);
  CHECK(ast.random_fns[2].name == "obsDiff");
  CHECK(ast.random_fns[2].body.kind == ExprKind::if_else);
}

TEST_CASE("aircraft variant parses: timesteps, prev, indexed constants, mixed") {
  ModelAST ast = parse_model_text(fixtures::kAircraftVariant);
  CHECK(ast.type_decls == std::vector<std::string>{"t_radar"});
  REQUIRE(ast.distinct_decls.size() == 1);
  CHECK(ast.distinct_decls[0].items[0].count == 6);
  CHECK(ast.random_fns.size() == 3);
  CHECK(ast.fixed_fns.size() == 3);
  REQUIRE(ast.query_stmts.size() == 2);
  CHECK(ast.query_stmts[0].has_binder);
  CHECK(ast.query_stmts[0].binder_type == "Timestep");
  REQUIRE(ast.obs_stmts.size() == 1);
  CHECK(ast.obs_stmts[0].lhs.args[0].lit.is_time());
  CHECK(print_expr(ast.obs_stmts[0].lhs) == "obs_dist(@0, R[0])");
}

TEST_CASE("truncated declaration is a syntax error with a position") {
  try {
    parse_model_text("random Real X ~");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }
}

TEST_CASE("unexpected token names the expectation") {
  try {
    parse_model_text("random Real X ~ Gaussian(0, 1)");  // missing semicolon
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("';'") != std::string::npos);
  }
}

TEST_CASE("round trip: print then reparse is structurally identical") {
  for (const char* text :
       {fixtures::kGpaVariant, fixtures::kScaleVariant,
        fixtures::kAircraftVariant}) {
    ModelAST ast = parse_model_text(text);
    std::string printed = print_model(ast);
    ModelAST again = parse_model_text(printed);
    CHECK(ast_equal(ast, again));
    CHECK(print_model(again) == printed);
  }
}

TEST_CASE("round trip holds for the bundled model corpus") {
  for (const char* name :
       {"gpa.blog", "gpa_two_country.blog", "scale.blog", "scale_ssm.blog",
        "aircraft.blog"}) {
    ModelAST ast =
        parse_model_text(fixtures::read_file(fixtures::model_path(name)));
    ModelAST again = parse_model_text(print_model(ast));
    CHECK(ast_equal(ast, again));
  }
}

TEST_CASE("expression precedence and parenthesization round-trip") {
  const char* text =
      "random Real Z ~ if (1 + 2 * 3 - 4) / 5 >= -6 then Gaussian(1 - 2 - 3, "
      "1) else Gaussian(-(1 + 2), 2 * (3 + 4));\n";
  ModelAST ast = parse_model_text(text);
  ModelAST again = parse_model_text(print_model(ast));
  CHECK(ast_equal(ast, again));
}
