#include <doctest.h>

#include <cmath>

#include "mixppl/infer.hpp"
#include "mixppl/numeric.hpp"
#include "mixppl/parser.hpp"
#include "mixppl/resolve.hpp"
#include "mixppl/verify.hpp"
#include "support/fixtures.hpp"

using namespace mixppl;

namespace {

// discretized open-universe regression model: counts capped at 2, GPA on a
// three-point grid
const char* kGpaSmall =
    "type Applicant, Country;\n"
    "distinct Country NewZealand, India, USA;\n"
    "#Applicant(Nationality = c) ~\n"
    "  if c == USA then Categorical({ 0 -> 0.1, 1 -> 0.5, 2 -> 0.4 })\n"
    "  else Categorical({ 0 -> 0.5, 1 -> 0.4, 2 -> 0.1 });\n"
    "origin Country Nationality(Applicant);\n"
    "random Int GPA(Applicant s) ~\n"
    "  if Nationality(s) == USA then Categorical({ 4 -> 0.3, 3 -> 0.5, 2 -> "
    "0.2 })\n"
    "  else Categorical({ 4 -> 0.05, 3 -> 0.25, 2 -> 0.7 });\n"
    "random Applicant David ~ UniformChoice({a for Applicant a});\n"
    "obs GPA(David) = 4;\n"
    "query Nationality(David) == USA;\n";

}  // namespace

TEST_CASE("exact enumeration reproduces the two-line Bayes computation") {
  Model m = load_model_text(
      "random Bool X ~ BooleanDistrib(0.3);\n"
      "random Bool Y ~ if X then BooleanDistrib(0.9) else "
      "BooleanDistrib(0.2);\n"
      "obs Y = true;\nquery X;\n");
  auto exact = verify::exact_posterior_discrete(m);
  REQUIRE(exact.queries.size() == 1);
  CHECK(exact.queries[0].second ==
        doctest::Approx(0.27 / (0.27 + 0.14)).epsilon(1e-12));
}

TEST_CASE("no evidence: enumeration returns prior marginals") {
  Model m = load_model_text(
      "random Bool X ~ BooleanDistrib(0.3);\nquery X;\n");
  auto exact = verify::exact_posterior_discrete(m);
  CHECK(exact.queries[0].second == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("discretized GPA model: engines track the enumeration reference") {
  Model m = load_model_text(kGpaSmall);
  auto exact = verify::exact_posterior_discrete(m);
  double reference = exact.queries[0].second;
  CHECK(reference > 0.0);
  CHECK(reference < 1.0);

  InferOptions opts;
  opts.seed = 19;
  PosteriorEstimate lex = llw_run(m, 100000, opts);
  PosteriorEstimate naive = naive_lw_run(m, 100000, opts);
  CHECK(lex.queries[0].estimate == naive.queries[0].estimate);  // discrete
  double band = 3.0 * std::max(lex.queries[0].std_error, 1e-6);
  CHECK(std::fabs(lex.queries[0].estimate - reference) <= band);
}

TEST_CASE("enumeration rejects models with continuous kernels") {
  Model m = load_model_text(
      fixtures::read_file(fixtures::model_path("scale.blog")));
  try {
    verify::exact_posterior_discrete(m);
    FAIL("expected unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported);
  }
}

TEST_CASE("enumeration enforces the world bound") {
  Model m = load_model_text(
      "random Bool X ~ BooleanDistrib(0.3);\n"
      "random Bool Y ~ if X then BooleanDistrib(0.9) else "
      "BooleanDistrib(0.2);\n"
      "obs Y = true;\nquery X;\n");
  try {
    verify::exact_posterior_discrete(m, 1);
    FAIL("expected bound_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bound_exceeded);
  }
}

TEST_CASE("quadrature integrates the standard normal to 1") {
  double total =
      verify::integrate([](double x) { return norm_pdf(x); }, -9.0, 9.0);
  CHECK(std::fabs(total - 1.0) < 1e-9);
}

TEST_CASE("expected observation density: quadrature matches the closed form") {
  // D ~ TruncatedGauss(0.5, 1, 0.1, 1); observation Gaussian(D, sigma^2)
  // read at 0. The Gaussian product identity gives the closed form.
  Kernel latent = make_trunc_gauss(0.5, 1, 0.1, 1);
  for (double sigma : {1.0, 2.0, 4.0}) {
    double got = verify::expected_density_at(
        latent, [&](double v) { return make_gaussian(v, sigma * sigma); },
        0.0);

    double z = norm_cdf(0.5) - norm_cdf(-0.4);
    double s2 = sigma * sigma;
    double marginal_sd = std::sqrt(1.0 + s2);
    double m_tilde = 0.5 * s2 / (1.0 + s2);
    double s_tilde = sigma / marginal_sd;
    double closed = norm_pdf(0.5 / marginal_sd) / marginal_sd *
                    (norm_cdf((1.0 - m_tilde) / s_tilde) -
                     norm_cdf((0.1 - m_tilde) / s_tilde)) /
                    z;
    CHECK(got == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("degenerate latent collapses the integral to a point") {
  Kernel latent = make_atom(Value(0.7));
  double got = verify::expected_density_at(
      latent, [](double v) { return make_gaussian(v, 1.0); }, 0.0);
  CHECK(got == doctest::Approx(norm_pdf(0.7)).epsilon(1e-12));
}

TEST_CASE("symmetric latents give symmetric expectations") {
  Kernel latent = make_unif(-2, 2);
  double a = verify::expected_density_at(
      latent, [](double v) { return make_gaussian(v, 1.0); }, 0.0);
  double b = verify::expected_density_at(
      latent, [](double v) { return make_gaussian(-v, 1.0); }, 0.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("dataset generation is deterministic and sized by T") {
  Model m = load_model_text(
      fixtures::read_file(fixtures::model_path("aircraft.blog")));
  auto d1 = verify::generate_ssm_dataset(m, 8, 424242);
  auto d2 = verify::generate_ssm_dataset(m, 8, 424242);
  CHECK(d1.obs_text == d2.obs_text);
  CHECK(d1.truth_csv() == d2.truth_csv());
  CHECK(d1.truth_rows.size() == 9);

  auto d3 = verify::generate_ssm_dataset(m, 8, 7);
  CHECK(d3.obs_text != d1.obs_text);

  auto single = verify::generate_ssm_dataset(m, 0, 1);
  CHECK(single.truth_rows.size() == 1);
  // 6 radars, one observation statement each
  CHECK(std::count(single.obs_text.begin(), single.obs_text.end(), '\n') == 6);

  CHECK(d1.truth_csv().rfind("t,X_true,Y_true\n", 0) == 0);
}

TEST_CASE("noiseless observations equal the true distances exactly") {
  const char* text =
      "type T;\ndistinct T r1, r2;\n"
      "fixed Real loc_x(T q) = { r1 -> 3.0, r2 -> 0.0 };\n"
      "fixed Real loc_y(T q) = { r1 -> 4.0, r2 -> 1.0 };\n"
      "random Real X(Timestep t) ~ if t == @0 then Gaussian(0, 1) else "
      "Gaussian(X(prev(t)), 1);\n"
      "random Real Y(Timestep t) ~ if t == @0 then Gaussian(0, 1) else "
      "Gaussian(Y(prev(t)), 1);\n"
      "random Real obs_d(Timestep t, T r) ~ Mix({ dist(X(t), Y(t), r) -> 1.0 "
      "});\n"
      "query X(t) for Timestep t;\nquery Y(t) for Timestep t;\n";
  Model m = load_model_text(text);
  auto data = verify::generate_ssm_dataset(m, 3, 99);

  ModelAST obs_ast = parse_model_text(data.obs_text);
  REQUIRE(obs_ast.obs_stmts.size() == 8);  // 4 steps x 2 stations
  double loc[2][2] = {{3.0, 4.0}, {0.0, 1.0}};
  for (const auto& o : obs_ast.obs_stmts) {
    int t = static_cast<int>(o.lhs.args[0].lit.as_time().t);
    int r = o.lhs.args[1].name == "r1" ? 0 : 1;
    double x = data.truth_rows[t][1];
    double y = data.truth_rows[t][2];
    double dx = x - loc[r][0];
    double dy = y - loc[r][1];
    double expected = std::sqrt(dx * dx + dy * dy);
    CHECK(o.value.lit.as_real() == expected);
  }
}

TEST_CASE("generated aircraft dataset drives the particle filters") {
  std::string base =
      fixtures::read_file(fixtures::model_path("aircraft.blog"));
  Model gen = load_model_text(base);
  auto data = verify::generate_ssm_dataset(gen, 3, 5);
  Model m = load_model_text(base + "\n" + data.obs_text);
  CHECK(m.timestep_indexed);
  CHECK(m.max_evidence_timestep == 3);

  InferOptions opts;
  opts.seed = 77;
  auto steps = lpf_run(m, 300, opts);
  REQUIRE(steps.size() == 4);
  for (const auto& s : steps) {
    CHECK(s.population == 300);
    CHECK(s.surviving >= 1);
    CHECK(std::isfinite(s.queries[0].estimate));
    CHECK(std::isfinite(s.queries[1].estimate));
  }
}
