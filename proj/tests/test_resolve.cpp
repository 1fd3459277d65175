#include <doctest.h>

#include "mixppl/resolve.hpp"
#include "support/fixtures.hpp"

using namespace mixppl;

TEST_CASE("GPA variant resolves with kernels for every declaration") {
  Model m = load_model_text(fixtures::kGpaVariant);
  CHECK(m.number_stmts.size() == 1);
  CHECK(m.find_random_fn("GPA") >= 0);
  CHECK(m.find_random_fn("David") >= 0);
  CHECK(m.find_type("Applicant") >= kFirstUserType);
  CHECK(m.constants.size() == 3);
  CHECK(m.evidence.size() == 1);
  CHECK(m.evidence[0].observed == Value(4.0));  // coerced to Real
  REQUIRE(m.queries.size() == 1);
  CHECK(m.queries[0].display == "Nationality(David) == USA");
  CHECK(m.queries[0].value_type == kTypeBool);
  CHECK_FALSE(m.timestep_indexed);
}

TEST_CASE("all three variant spellings resolve with zero diagnostics") {
  CHECK_NOTHROW(load_model_text(fixtures::kGpaVariant));
  CHECK_NOTHROW(load_model_text(fixtures::kScaleVariant));
  CHECK_NOTHROW(load_model_text(fixtures::kAircraftVariant));
}

TEST_CASE("bundled corpus resolves with zero diagnostics") {
  for (const char* name :
       {"gpa.blog", "gpa_two_country.blog", "scale.blog", "scale_ssm.blog",
        "aircraft.blog"}) {
    CHECK_NOTHROW(
        load_model_text(fixtures::read_file(fixtures::model_path(name))));
  }
}

TEST_CASE("aircraft model is recognized as timestep-indexed") {
  Model m = load_model_text(fixtures::kAircraftVariant);
  CHECK(m.timestep_indexed);
  CHECK(m.max_evidence_timestep == 0);
  CHECK(m.fixed_fns.size() == 3);
  CHECK(m.fixed_fns[0].def == FixedDef::table);
}

TEST_CASE("two-node static cycle is rejected") {
  const char* text =
      "random Real A ~ Gaussian(B, 1);\n"
      "random Real B ~ Gaussian(A, 1);\n";
  try {
    load_model_text(text);
    FAIL("expected a static-cycle error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::static_cycle);
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
}

TEST_CASE("timestep-indexed self-reference is not a static cycle") {
  const char* text =
      "random Real X(Timestep t) ~ if t == @0 then Gaussian(0, 1) else "
      "Gaussian(X(prev(t)), 1);\n";
  CHECK_NOTHROW(load_model_text(text));
}

TEST_CASE("constant Mix weights must sum to 1 within 1e-9") {
  const char* text =
      "random Real X ~ Mix({ Unif(0, 1) -> 0.5, 2 -> 0.6 });\n";
  try {
    load_model_text(text);
    FAIL("expected a weight-sum error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::weight_sum);
  }
  CHECK_NOTHROW(load_model_text(
      "random Real X ~ Mix({ Unif(0, 1) -> 0.5, 2 -> 0.5 });\n"));
}

TEST_CASE("unknown identifier is reported") {
  try {
    load_model_text("random Real X ~ Gaussian(mu, 1);\n");
    FAIL("expected a resolve error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resolve_error);
    CHECK(std::string(e.what()).find("mu") != std::string::npos);
  }
}

TEST_CASE("type errors are rejected") {
  // Bool function with a Real-producing body
  CHECK_THROWS_AS(load_model_text("random Bool X ~ Gaussian(0, 1);\n"),
                  Error);
  // condition must be Bool
  CHECK_THROWS_AS(
      load_model_text("random Real X ~ if 3 then Gaussian(0, 1) else "
                      "Gaussian(1, 1);\n"),
      Error);
}

TEST_CASE("origin function signature mismatches are rejected") {
  const char* text =
      "type A, B, C;\n"
      "distinct C c1;\n"
      "origin C Of(B);\n"
      "#A(Of = x) ~ Poisson(1);\n";
  try {
    load_model_text(text);
    FAIL("expected a resolve error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resolve_error);
    CHECK(std::string(e.what()).find("Of") != std::string::npos);
  }
}

TEST_CASE("duplicate dependency statements are rejected") {
  const char* text =
      "random Real X ~ Gaussian(0, 1);\n"
      "random Real X ~ Gaussian(1, 1);\n";
  CHECK_THROWS_AS(load_model_text(text), Error);
}

TEST_CASE("prev(@0) in plain sight is a resolution error") {
  CHECK_THROWS_AS(
      load_model_text(
          "random Real X(Timestep t) ~ Gaussian(X(prev(@0)), 1);\n"),
      Error);
  // guarded occurrences are legal
  CHECK_NOTHROW(load_model_text(
      "random Real X(Timestep t) ~ if t == @0 then Gaussian(0, 1) else "
      "Gaussian(X(prev(t)), 1);\n"));
}

TEST_CASE("evidence validation") {
  // null evidence rejected at load time
  CHECK_THROWS_AS(
      load_model_text("random Real X ~ Gaussian(0, 1);\nobs X = null;\n"),
      Error);
  // object-valued evidence rejected
  const char* object_obs =
      "type T;\ndistinct T a;\n"
      "random T Y ~ UniformChoice({x for T x});\nobs Y = a;\n";
  try {
    load_model_text(object_obs);
    FAIL("expected a bad-evidence error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bad_evidence);
  }
}

TEST_CASE("resolution is deterministic: identical serialized form") {
  std::string text = fixtures::read_file(fixtures::model_path("gpa.blog"));
  Model a = load_model_text(text);
  Model b = load_model_text(text);
  CHECK(a.describe() == b.describe());
  CHECK(!a.describe().empty());
}
