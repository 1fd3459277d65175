#include "mixppl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mixppl/numeric.hpp"

namespace mixppl::verify {

namespace {

// Replays a scripted prefix of choices and extends it depth-first. Instead
// of drawing from a kernel it walks the kernel's finite support.
class EnumerationDriver : public ChoiceDriver {
 public:
  std::vector<std::size_t> path;
  std::vector<std::size_t> widths;  // support size at each depth
  double mass = 1.0;
  std::size_t depth = 0;

  Value choose(const BasicRV&, const Kernel& k) override {
    auto support = kernel_support(k);
    if (depth == path.size()) {
      path.push_back(0);
      widths.push_back(support.size());
    }
    std::size_t idx = path[depth];
    mass *= support[idx].second;
    ++depth;
    return support[idx].first;
  }
};

double query_as_real(const QueryDecl& q, const Value& v) {
  if (q.value_type == kTypeBool) {
    if (v.is_null()) return 0.0;
    return v.as_bool() ? 1.0 : 0.0;
  }
  if (v.is_null())
    fail(ErrorCode::eval_error, "query '" + q.display + "' evaluated to null");
  if (v.is_time()) return static_cast<double>(v.as_time().t);
  return v.to_real();
}

}  // namespace

ExactPosterior exact_posterior_discrete(const Model& m,
                                        std::int64_t max_worlds) {
  const int nq = static_cast<int>(m.queries.size());
  for (const QueryDecl& q : m.queries)
    if (q.has_binder)
      fail(ErrorCode::unsupported,
           "enumeration does not support timestep-bound queries");

  std::vector<double> sum_f(nq, 0.0);
  double total = 0.0;
  std::int64_t worlds = 0;

  EnumerationDriver driver;
  for (;;) {
    driver.mass = 1.0;
    driver.depth = 0;
    World world;
    WorldContext ctx(m, world, driver);

    std::size_t n_ev = m.evidence.size();
    double evidence_mass = 1.0;
    for (std::size_t i = 0; i < n_ev; ++i) {
      BasicRV rv;
      if (!ctx.resolve_application(m.evidence[i], rv)) {
        evidence_mass = 0.0;
        continue;
      }
      ctx.clamp(rv, m.evidence[i].observed);
      LikelihoodTerm term = ctx.likelihood(rv, m.evidence[i].observed);
      if (term.is_density())
        fail(ErrorCode::unsupported,
             "model is not finite discrete: evidence node " +
                 rv_str(m, rv) + " has a density part");
      evidence_mass *= term.value;
    }

    // query evaluation may instantiate further variables, whose choice
    // masses then belong to the joint; read driver.mass afterwards
    if (driver.mass * evidence_mass > 0.0) {
      std::vector<double> fvals(nq);
      for (int q = 0; q < nq; ++q) {
        Env env;
        fvals[q] =
            query_as_real(m.queries[q], ctx.eval(m.queries[q].expr, env));
      }
      double joint = driver.mass * evidence_mass;
      total += joint;
      for (int q = 0; q < nq; ++q) sum_f[q] += joint * fvals[q];
    }

    if (++worlds > max_worlds)
      fail(ErrorCode::bound_exceeded,
           "world enumeration exceeded " + std::to_string(max_worlds));

    // advance the odometer
    driver.path.resize(driver.depth);
    driver.widths.resize(driver.depth);
    while (!driver.path.empty() &&
           ++driver.path.back() >= driver.widths.back()) {
      driver.path.pop_back();
      driver.widths.pop_back();
    }
    if (driver.path.empty()) break;
  }

  if (!(total > 0.0))
    fail(ErrorCode::zero_total_weight,
         "no consistent world carries positive probability");

  ExactPosterior out;
  out.worlds = worlds;
  for (int q = 0; q < nq; ++q)
    out.queries.emplace_back(m.queries[q].display, sum_f[q] / total);
  return out;
}

// ---------------------------------------------------------------------------
// quadrature

namespace {

double simpson(const std::function<double(double)>& f, double a, double m,
               double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a,
                    double b, double fa, double fm, double fb, double whole,
                    double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(f, a, lm, m, fa, flm, fm);
  double right = simpson(f, m, rm, b, fm, frm, fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol) {
  if (!(lo < hi)) return 0.0;
  double fa = f(lo);
  double fm = f(0.5 * (lo + hi));
  double fb = f(hi);
  double whole = simpson(f, lo, 0.5 * (lo + hi), hi, fa, fm, fb);
  double eps = std::max(1e-300, std::fabs(whole)) * rel_tol + 1e-15;
  return adaptive_rec(f, lo, hi, fa, fm, fb, whole, eps, 48);
}

namespace {

void latent_bounds(const Kernel& k, double& lo, double& hi) {
  switch (k.kind) {
    case KernelKind::gaussian: {
      double sd = std::sqrt(k.b);
      lo = k.a - 12.0 * sd;
      hi = k.a + 12.0 * sd;
      return;
    }
    case KernelKind::trunc_gauss:
      lo = k.c;
      hi = k.d;
      return;
    case KernelKind::unif:
      lo = k.a;
      hi = k.b;
      return;
    default:
      fail(ErrorCode::unsupported,
           "latent kernel is not integrable by this oracle");
  }
}

}  // namespace

double expected_density_at(const Kernel& latent,
                           const std::function<Kernel(double)>& obs_kernel,
                           double y, double rel_tol) {
  auto obs_value = [&](double v) {
    Kernel k = obs_kernel(v);
    return evaluate_at(k, Value(y)).value;
  };

  switch (latent.kind) {
    case KernelKind::atom:
      return obs_value(latent.atoms.front().first.to_real());
    case KernelKind::categorical: {
      double total = 0.0;
      for (const auto& [value, mass] : latent.atoms)
        total += mass * obs_value(value.to_real());
      return total;
    }
    case KernelKind::mixture: {
      double total = 0.0;
      for (const auto& [value, mass] : latent.atoms)
        total += mass * obs_value(value.to_real());
      for (std::size_t i = 0; i < latent.parts.size(); ++i)
        total += latent.part_weights[i] *
                 expected_density_at(latent.parts[i], obs_kernel, y, rel_tol);
      return total;
    }
    default: {
      double lo, hi;
      latent_bounds(latent, lo, hi);
      return integrate(
          [&](double v) { return continuous_density(latent, v) * obs_value(v); },
          lo, hi, rel_tol);
    }
  }
}

// ---------------------------------------------------------------------------
// dataset generation

std::string SsmDataset::truth_csv() const {
  std::string out = "t";
  for (const std::string& c : truth_columns) out += "," + c;
  out += "\n";
  for (const auto& row : truth_rows) {
    out += Value(static_cast<std::int64_t>(row[0])).str();
    for (std::size_t i = 1; i < row.size(); ++i) out += "," + Value(row[i]).str();
    out += "\n";
  }
  return out;
}

SsmDataset generate_ssm_dataset(const Model& m, int T, std::uint64_t seed) {
  if (!m.timestep_indexed)
    fail(ErrorCode::precondition, "model is not timestep-indexed");
  if (T < 0) fail(ErrorCode::precondition, "T must be >= 0");

  // observation functions: real-valued leaves of the static dependency graph
  std::unordered_set<std::string> referenced;
  for (const auto& [from, to] : m.static_edges) referenced.insert(from);
  std::vector<int> obs_fns;
  for (std::size_t i = 0; i < m.random_fns.size(); ++i) {
    const RandomDecl& fn = m.random_fns[i];
    if (fn.ret_type == kTypeReal && !referenced.count(fn.name))
      obs_fns.push_back(static_cast<int>(i));
  }
  if (obs_fns.empty())
    fail(ErrorCode::precondition, "model has no observable leaf functions");

  // ground truth: binder queries of the form fn(t)
  std::vector<int> truth_fns;
  for (const QueryDecl& q : m.queries) {
    if (!q.has_binder || q.expr.kind != ExprKind::call ||
        q.expr.ref != RefKind::random_fn)
      continue;
    truth_fns.push_back(q.expr.ref_id);
  }

  Rng rng = substream(seed, 0);
  SamplingDriver driver(rng);
  World world;
  WorldContext ctx(m, world, driver);

  SsmDataset out;
  for (int fn : truth_fns)
    out.truth_columns.push_back(m.random_fns[fn].name + "_true");

  for (int t = 0; t <= T; ++t) {
    Value ts = Value(Timestep{t});
    for (int fn : obs_fns) {
      const RandomDecl& decl = m.random_fns[fn];
      // argument tuples: the timestep plus every combination of distinct
      // constants for the remaining object parameters
      std::vector<std::vector<Value>> tuples{{}};
      for (const Param& p : decl.params) {
        std::vector<std::vector<Value>> next;
        if (p.type == kTypeTimestep) {
          for (auto& tuple : tuples) {
            tuple.push_back(ts);
            next.push_back(std::move(tuple));
          }
        } else {
          if (p.type < kFirstUserType || !m.numbers_by_type[p.type].empty())
            fail(ErrorCode::unsupported,
                 "dataset generation needs distinct-constant arguments");
          for (const auto& tuple : tuples)
            for (int cid : m.constants_by_type[p.type]) {
              auto with = tuple;
              with.push_back(Value(m.constants[cid].object));
              next.push_back(std::move(with));
            }
        }
        tuples = std::move(next);
      }
      for (auto& tuple : tuples) {
        BasicRV rv = rv_app(fn, tuple);
        Value v = ctx.demand(rv);
        out.obs_text += "obs " + rv_str(m, rv) + " = " + v.str() + ";\n";
      }
    }
    std::vector<double> row{static_cast<double>(t)};
    for (int fn : truth_fns)
      row.push_back(ctx.demand(rv_app(fn, {ts})).to_real());
    out.truth_rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mixppl::verify
