#include <doctest.h>

#include <cmath>

#include "mixppl/model.hpp"
#include "mixppl/resolve.hpp"
#include "support/fixtures.hpp"
#include "support/stats.hpp"

using namespace mixppl;

namespace {

Model bernoulli_model() {
  return load_model_text(
      "random Bool X ~ BooleanDistrib(0.5);\nquery X;\n");
}

// evaluates the first query expression of a model in a fresh world
Value eval_query(const Model& m, std::uint64_t seed = 0) {
  Rng rng = substream(seed, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  Env env;
  return ctx.eval(m.queries[0].expr, env);
}

}  // namespace

TEST_CASE("fair Bernoulli worlds: empirical frequency of true") {
  Model m = bernoulli_model();
  BasicRV x = rv_app(m.find_random_fn("X"));
  const std::size_t n = 100000;
  std::size_t trues = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = substream(7, i);
    World w = sample_world(m, rng, std::span<const BasicRV>(&x, 1));
    REQUIRE(w.size() == 1);
    if (w.find(x)->as_bool()) ++trues;
  }
  CHECK(std::fabs(double(trues) / n - 0.5) <= stats::binomial_3sigma(0.5, n));
}

TEST_CASE("GPA world holds the number variables, David and his GPA") {
  Model m = load_model_text(fixtures::kGpaVariant);
  Rng rng = substream(3, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);

  Value david = ctx.demand(rv_app(m.find_random_fn("David")));
  REQUIRE(david.is_object());
  Value gpa = ctx.demand(rv_app(m.find_random_fn("GPA"), {david}));
  CHECK(gpa.is_real());

  // all three number variables were forced into existence
  int n_number = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w.rv_at(i).kind == BasicRV::Kind::number_var) ++n_number;
  CHECK(n_number == 3);

  // origin semantics: Nationality(David) recovers the generation argument
  Env env;
  Value nationality = ctx.eval(m.queries[0].expr.args[0], env);
  REQUIRE(nationality.is_object());
  CHECK(nationality == david.as_object()->origin_args[0]);

  // instantiation order is topological: David precedes GPA(David)
  int pos_david = -1, pos_gpa = -1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.rv_at(i).decl == m.find_random_fn("David") &&
        w.rv_at(i).kind == BasicRV::Kind::func_app)
      pos_david = static_cast<int>(i);
    if (w.rv_at(i).decl == m.find_random_fn("GPA") &&
        w.rv_at(i).kind == BasicRV::Kind::func_app)
      pos_gpa = static_cast<int>(i);
  }
  REQUIRE(pos_david >= 0);
  REQUIRE(pos_gpa >= 0);
  CHECK(pos_david < pos_gpa);

  CHECK(check_consistency(m, w));
}

TEST_CASE("self-loop smuggled past the static check trips the dynamic one") {
  ResolveOptions opts;
  opts.static_cycle_check = false;
  Model m =
      load_model_text("random Real A ~ Gaussian(A, 1);\nquery A;\n", opts);
  Rng rng = substream(0, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  try {
    ctx.demand(rv_app(m.find_random_fn("A")));
    FAIL("expected a dynamic-cycle error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dynamic_cycle);
  }
}

TEST_CASE("eval: literals, guards, builtin distance") {
  Model m = load_model_text("random Real Z ~ Gaussian(0, 1);\nquery if true then 1 else 2;\n");
  CHECK(eval_query(m) == Value(std::int64_t{1}));

  Model dist_m = load_model_text(
      "type T;\ndistinct T r;\n"
      "fixed Real loc_x(T q) = { r -> 3.0 };\n"
      "fixed Real loc_y(T q) = { r -> 4.0 };\n"
      "random Real Z ~ Gaussian(0, 1);\n"
      "query dist(0.0, 0.0, r);\n");
  CHECK(eval_query(dist_m) == Value(5.0));
}

TEST_CASE("eval: division by zero is an error, null propagates") {
  Model m = load_model_text(
      "type T;\n"
      "random T Y ~ UniformChoice({x for T x});\n"  // empty type: always null
      "random Real Z ~ Gaussian(0, 1);\n"
      "query Y == Y;\n");
  CHECK(eval_query(m) == Value(true));  // null == null

  Model div = load_model_text(
      "random Real Z ~ Gaussian(0, 1);\nquery 1 / (2 - 2);\n");
  CHECK_THROWS_AS(eval_query(div), Error);
}

TEST_CASE("uniform choice over three applicants is uniform") {
  const char* text =
      "type A;\ndistinct A a1, a2, a3;\n"
      "random A Pick ~ UniformChoice({x for A x});\nquery Pick == a1;\n";
  Model m = load_model_text(text);
  const std::size_t n = 100000;
  std::size_t hits = 0;
  BasicRV pick = rv_app(m.find_random_fn("Pick"));
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = substream(11, i);
    World w = sample_world(m, rng, std::span<const BasicRV>(&pick, 1));
    if (w.find(pick)->as_object()->name == "a1") ++hits;
  }
  double third = 1.0 / 3.0;
  CHECK(std::fabs(double(hits) / n - third) <=
        stats::binomial_3sigma(third, n));
}

TEST_CASE("uniform choice over an empty set is null") {
  Model m = load_model_text(
      "type A;\nrandom A Pick ~ UniformChoice({x for A x});\nquery Pick == "
      "Pick;\n");
  Rng rng = substream(1, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  CHECK(ctx.demand(rv_app(m.find_random_fn("Pick"))).is_null());
}

TEST_CASE("forced counts: two of three applicants come from the USA") {
  Model m = load_model_text(fixtures::kGpaVariant);
  Rng rng = substream(13, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);

  // pin the number variables: USA=2, India=1, NewZealand=0
  auto country = [&](const char* name) {
    return Value(m.constants[m.find_constant(name)].object);
  };
  w.assign(rv_number(0, {country("USA")}), Value(std::int64_t{2}));
  w.assign(rv_number(0, {country("India")}), Value(std::int64_t{1}));
  w.assign(rv_number(0, {country("NewZealand")}), Value(std::int64_t{0}));

  int applicant = m.find_type("Applicant");
  auto objects = ctx.objects_of_type(applicant);
  REQUIRE(objects.size() == 3);
  int from_usa = 0;
  for (const Value& o : objects)
    if (value_eq(o.as_object()->origin_args[0], country("USA"))) ++from_usa;
  CHECK(from_usa == 2);  // exact ratio: P(David from USA) = 2/3

  // and the uniform draw respects it empirically
  const std::size_t n = 100000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rng r2 = substream(14, i);
    Kernel k = make_uniform_choice(objects);
    Value pick = sample_kernel(k, r2);
    if (value_eq(pick.as_object()->origin_args[0], country("USA"))) ++hits;
  }
  double p = 2.0 / 3.0;
  CHECK(std::fabs(double(hits) / n - p) <= stats::binomial_3sigma(p, n));
}

TEST_CASE("consistency: sampled worlds pass, manual violations fail") {
  Model m = load_model_text(fixtures::kGpaVariant);
  for (std::uint64_t s = 0; s < 32; ++s) {
    Rng rng = substream(17, s);
    SamplingDriver driver(rng);
    World w;
    WorldContext ctx(m, w, driver);
    Value david = ctx.demand(rv_app(m.find_random_fn("David")));
    if (david.is_object())
      ctx.demand(rv_app(m.find_random_fn("GPA"), {david}));
    CHECK(check_consistency(m, w));
  }

  // assigning GPA(u_3) while the number variable says 2 is inconsistent
  World w;
  Value usa = Value(m.constants[m.find_constant("USA")].object);
  w.assign(rv_number(0, {usa}), Value(std::int64_t{2}));
  auto cell = std::make_shared<ObjectCell>();
  cell->type = m.find_type("Applicant");
  cell->number_stmt = 0;
  cell->index = 3;
  cell->origin_args = {usa};
  cell->name = "Applicant";
  w.assign(rv_app(m.find_random_fn("GPA"), {Value(ObjectRef(cell))}),
           Value(3.0));
  CHECK_FALSE(check_consistency(m, w));

  // empty world on an empty model is consistent
  Model empty = load_model_text("random Real Z ~ Gaussian(0, 1);\nquery Z;\n");
  World nothing;
  CHECK(check_consistency(empty, nothing));
}

TEST_CASE("worlds are deterministic in the seed") {
  Model m = load_model_text(fixtures::kGpaVariant);
  auto run = [&](std::uint64_t seed) {
    Rng rng = substream(seed, 0);
    SamplingDriver driver(rng);
    World w;
    WorldContext ctx(m, w, driver);
    Value david = ctx.demand(rv_app(m.find_random_fn("David")));
    if (david.is_object())
      ctx.demand(rv_app(m.find_random_fn("GPA"), {david}));
    return w.dump(m);
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

TEST_CASE("object identity is provenance equality") {
  auto make = [](int stmt, int index, const Value& arg) {
    auto cell = std::make_shared<ObjectCell>();
    cell->type = 4;
    cell->number_stmt = stmt;
    cell->index = index;
    cell->origin_args = {arg};
    cell->name = "T";
    return Value(ObjectRef(cell));
  };
  Value a = make(0, 1, Value(2.0));
  Value b = make(0, 1, Value(2.0));
  Value c = make(0, 2, Value(2.0));
  Value d = make(1, 1, Value(2.0));
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK_FALSE(a == c);
  CHECK_FALSE(a == d);
}

TEST_CASE("world dump lists assignments in instantiation order") {
  Model m = bernoulli_model();
  Rng rng = substream(2, 4);
  BasicRV x = rv_app(m.find_random_fn("X"));
  World w = sample_world(m, rng, std::span<const BasicRV>(&x, 1));
  std::string dump = w.dump(m);
  bool expected = dump == "X = true\n" || dump == "X = false\n";
  CHECK(expected);
}

TEST_CASE("number variables beyond the object cap are rejected") {
  ResolveOptions opts;
  opts.run.object_cap = 10;
  Model m = load_model_text(
      "type A;\n#A ~ Poisson(300);\n"
      "random A Pick ~ UniformChoice({x for A x});\nquery Pick == Pick;\n",
      opts);
  Rng rng = substream(0, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  try {
    ctx.demand(rv_app(m.find_random_fn("Pick")));
    FAIL("expected an object-cap error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::object_cap);
  }
}

TEST_CASE("expression-valued Mix weights are re-validated per evaluation") {
  const char* bad =
      "fixed Real w = 0.6;\n"
      "random Real X ~ Mix({ Unif(0, 1) -> w, 2.0 -> w });\n"
      "query X;\n";
  Model m = load_model_text(bad);  // static check cannot see through names
  Rng rng = substream(0, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  try {
    ctx.demand(rv_app(m.find_random_fn("X")));
    FAIL("expected a weight-sum error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::weight_sum);
  }

  const char* good =
      "fixed Real w = 0.6;\nfixed Real w2 = 0.4;\n"
      "random Real X ~ Mix({ Unif(0, 1) -> w, 2.0 -> w2 });\n"
      "query X;\n";
  Model ok = load_model_text(good);
  Rng rng2 = substream(0, 1);
  SamplingDriver driver2(rng2);
  World w2;
  WorldContext ctx2(ok, w2, driver2);
  CHECK_NOTHROW(ctx2.demand(rv_app(ok.find_random_fn("X"))));
}

TEST_CASE("timestep memoization: prev(t) re-reads instead of re-sampling") {
  Model m = load_model_text(
      "random Real X(Timestep t) ~ if t == @0 then Gaussian(0, 1) else "
      "Gaussian(X(prev(t)), 1);\n"
      "random Real D(Timestep t) ~ Gaussian(X(t) - X(t), 0.0001);\n"
      "query X(t) for Timestep t;\n");
  Rng rng = substream(8, 0);
  SamplingDriver driver(rng);
  World w;
  WorldContext ctx(m, w, driver);
  int x = m.find_random_fn("X");
  Value x2 = ctx.demand(rv_app(x, {Value(Timestep{2})}));
  Value x2_again = ctx.demand(rv_app(x, {Value(Timestep{2})}));
  CHECK(x2 == x2_again);
  // three timesteps were instantiated on the way
  CHECK(w.size() == 3);
}
