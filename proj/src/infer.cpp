#include "mixppl/infer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <thread>

namespace mixppl {

LexWeight update_lexweight(LexWeight lw, const LikelihoodTerm& term) {
  if (term.is_mass()) {
    lw.logw += term.value > 0.0 ? std::log(term.value) : kNegInf;
  } else {
    ++lw.d;
    lw.logw += term.value > 0.0 ? std::log(term.value) : kNegInf;
  }
  return lw;
}

double alpha_n(double y, int n) {
  if (n < 1) fail(ErrorCode::invalid_params, "refinement level must be >= 1");
  return std::ldexp(std::ceil(std::ldexp(y, n)), -n);
}

double cell_probability(const Kernel& k, double y, int n) {
  double hi = alpha_n(y, n);
  double lo = hi - std::ldexp(1.0, -n);
  double p = cdf_at(k, hi) - cdf_at(k, lo);
  return p > 0.0 ? p : 0.0;
}

// ---------------------------------------------------------------------------
// combiner

namespace {

// Weighted sums with a running log-scale so weights never overflow. All
// sums share one scale, which keeps ratios of identical additions exact.
struct Accum {
  double max_log = kNegInf;
  double s_w = 0.0;
  double s_w2 = 0.0;
  std::vector<double> s_wf;
  std::vector<double> s_w2f;
  std::vector<double> s_w2ff;
  std::int64_t count = 0;

  explicit Accum(int n_queries)
      : s_wf(n_queries, 0.0), s_w2f(n_queries, 0.0), s_w2ff(n_queries, 0.0) {}

  void add(double logw, const double* f, int nq) {
    ++count;
    double w;
    if (logw <= max_log) {
      w = std::exp(logw - max_log);
    } else {
      double scale = max_log == kNegInf ? 0.0 : std::exp(max_log - logw);
      double scale2 = scale * scale;
      s_w *= scale;
      s_w2 *= scale2;
      for (int q = 0; q < nq; ++q) {
        s_wf[q] *= scale;
        s_w2f[q] *= scale2;
        s_w2ff[q] *= scale2;
      }
      max_log = logw;
      w = 1.0;
    }
    double w2 = w * w;
    s_w += w;
    s_w2 += w2;
    for (int q = 0; q < nq; ++q) {
      s_wf[q] += w * f[q];
      s_w2f[q] += w2 * f[q];
      s_w2ff[q] += w2 * f[q] * f[q];
    }
  }
};

}  // namespace

PosteriorEstimate combine_weighted_samples(std::span<const int> d,
                                           std::span<const double> logw,
                                           std::span<const double> f,
                                           int n_queries, bool lexicographic,
                                           std::int64_t trace_points) {
  const std::int64_t n = static_cast<std::int64_t>(d.size());
  std::map<int, Accum> by_d;

  PosteriorEstimate out;
  out.lexicographic = lexicographic;
  out.population = n;
  out.queries.resize(n_queries);

  std::int64_t stride =
      trace_points > 0 ? std::max<std::int64_t>(1, n / trace_points) : 0;

  auto current = [&](int q, int* d_star) -> double {
    for (const auto& [dv, acc] : by_d) {
      if (acc.s_w <= 0.0) continue;
      if (d_star) *d_star = dv;
      return acc.s_wf[q] / acc.s_w;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  for (std::int64_t k = 0; k < n; ++k) {
    if (logw[k] != kNegInf) {
      int key = lexicographic ? d[k] : 0;
      auto it = by_d.find(key);
      if (it == by_d.end()) it = by_d.emplace(key, Accum(n_queries)).first;
      it->second.add(logw[k], f.data() + k * n_queries, n_queries);
    }
    if (stride > 0 && ((k + 1) % stride == 0 || k + 1 == n)) {
      for (int q = 0; q < n_queries; ++q) {
        double est = current(q, nullptr);
        if (!std::isnan(est)) out.trace.push_back({k + 1, q, est});
      }
    }
  }

  const Accum* best = nullptr;
  for (const auto& [dv, acc] : by_d) {
    if (acc.s_w > 0.0) {
      out.d_star = dv;
      best = &acc;
      break;
    }
  }
  if (!best)
    fail(ErrorCode::zero_total_weight,
         "all " + std::to_string(n) + " samples carry zero weight");

  out.surviving = best->count;
  out.ess = best->s_w * best->s_w / best->s_w2;
  for (int q = 0; q < n_queries; ++q) {
    double r = best->s_wf[q] / best->s_w;
    double var_num =
        best->s_w2ff[q] - 2.0 * r * best->s_w2f[q] + r * r * best->s_w2;
    out.queries[q].estimate = r;
    out.queries[q].std_error =
        var_num > 0.0 ? std::sqrt(var_num) / best->s_w : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// shared sampling machinery

namespace {

void parallel_units(std::int64_t n, int threads,
                    const std::function<void(std::int64_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::int64_t k = 0; k < n; ++k) fn(k);
    return;
  }
  int t = std::min<std::int64_t>(threads, n);
  std::vector<std::exception_ptr> errors(t);
  std::vector<std::int64_t> error_unit(t, -1);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int i = 0; i < t; ++i) {
    std::int64_t lo = n * i / t;
    std::int64_t hi = n * (i + 1) / t;
    pool.emplace_back([&, i, lo, hi] {
      for (std::int64_t k = lo; k < hi; ++k) {
        try {
          fn(k);
        } catch (...) {
          errors[i] = std::current_exception();
          error_unit[i] = k;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  // rethrow the error from the lowest unit so parallel runs fail like
  // serial ones
  std::int64_t first = -1;
  int who = -1;
  for (int i = 0; i < t; ++i)
    if (errors[i] && (first < 0 || error_unit[i] < first)) {
      first = error_unit[i];
      who = i;
    }
  if (who >= 0) std::rethrow_exception(errors[who]);
}

double query_value(WorldContext& ctx, const QueryDecl& q, int timestep) {
  Env env;
  if (q.has_binder) env.push_back(Value(Timestep{timestep}));
  Value v = ctx.eval(q.expr, env);
  if (q.value_type == kTypeBool) {
    if (v.is_null()) return 0.0;
    return v.as_bool() ? 1.0 : 0.0;
  }
  if (v.is_null())
    fail(ErrorCode::eval_error,
         "query '" + q.display + "' evaluated to null");
  if (v.is_time()) return static_cast<double>(v.as_time().t);
  return v.to_real();
}

void check_lw_preconditions(const Model& m) {
  if (m.evidence.empty())
    fail(ErrorCode::precondition, "model has no evidence");
  if (m.queries.empty())
    fail(ErrorCode::precondition, "model has no queries");
  for (const QueryDecl& q : m.queries)
    if (q.has_binder)
      fail(ErrorCode::precondition,
           "timestep-bound queries require the particle filter");
}

enum class WeightMode { lexicographic, naive };

struct LwRecords {
  std::vector<int> d;
  std::vector<double> logw;
  std::vector<double> f;
};

// Evidence nodes with world-independent arguments (literals, constants) are
// interned once per run instead of being re-resolved per sample.
std::vector<std::int32_t> prepare_evidence(
    const Model& m, const std::shared_ptr<RvTable>& table) {
  struct WouldSample {};
  struct NoSample : ChoiceDriver {
    Value choose(const BasicRV&, const Kernel&) override {
      throw WouldSample{};
    }
  } no_sample;
  std::vector<std::int32_t> ids;
  ids.reserve(m.evidence.size());
  for (const EvidenceDecl& e : m.evidence) {
    World probe(table);
    WorldContext ctx(m, probe, no_sample);
    std::int32_t id = -1;
    try {
      BasicRV rv;
      if (ctx.resolve_application(e, rv)) id = table->intern(rv);
    } catch (...) {
      id = -1;  // argument depends on the world; resolve per sample
    }
    ids.push_back(id);
  }
  return ids;
}

// One prior sample: clamp the evidence, fold its likelihood terms, read the
// queries. Shared by llw and naive lw.
LexWeight weigh_one_world(const Model& m, WorldContext& ctx, WeightMode mode,
                          std::span<const std::int32_t> prepared) {
  std::size_t n_ev = m.evidence.size();
  const RvTable& table = *ctx.world().table();
  std::vector<BasicRV> dynamic_rvs;
  std::vector<std::int32_t> rv_of(n_ev, -1);
  std::vector<char> is_null(n_ev, 0);
  for (std::size_t i = 0; i < n_ev; ++i) {
    if (prepared[i] >= 0) {
      ctx.clamp_id(prepared[i], m.evidence[i].observed);
      continue;
    }
    BasicRV rv;
    if (ctx.resolve_application(m.evidence[i], rv)) {
      ctx.clamp(rv, m.evidence[i].observed);
      rv_of[i] = static_cast<std::int32_t>(dynamic_rvs.size());
      dynamic_rvs.push_back(std::move(rv));
    } else {
      is_null[i] = 1;  // a null argument: the node is deterministically null
    }
  }
  LexWeight lw;
  for (std::size_t i = 0; i < n_ev; ++i) {
    LikelihoodTerm term = LikelihoodTerm::mass(0.0);
    if (!is_null[i]) {
      const BasicRV& rv =
          prepared[i] >= 0 ? table.def(prepared[i]) : dynamic_rvs[rv_of[i]];
      term = ctx.likelihood(rv, m.evidence[i].observed);
    }
    if (mode == WeightMode::lexicographic) {
      lw = update_lexweight(lw, term);
    } else {
      lw.logw += term.value > 0.0 ? std::log(term.value) : kNegInf;
    }
  }
  return lw;
}

PosteriorEstimate lw_family_run(const Model& m, std::int64_t samples,
                                const InferOptions& options, WeightMode mode) {
  check_lw_preconditions(m);
  if (samples < 1) fail(ErrorCode::precondition, "sample count must be >= 1");

  const int nq = static_cast<int>(m.queries.size());
  LwRecords rec;
  rec.d.assign(samples, 0);
  rec.logw.assign(samples, 0.0);
  rec.f.assign(samples * nq, 0.0);

  auto table = std::make_shared<RvTable>(options.threads > 1);
  std::vector<std::int32_t> prepared = prepare_evidence(m, table);
  parallel_units(samples, options.threads, [&](std::int64_t k) {
    Rng rng = substream(options.seed, static_cast<std::uint64_t>(k));
    SamplingDriver driver(rng);
    World world(table);
    WorldContext ctx(m, world, driver);
    LexWeight lw = weigh_one_world(m, ctx, mode, prepared);
    rec.d[k] = lw.d;
    rec.logw[k] = lw.logw;
    for (int q = 0; q < nq; ++q)
      rec.f[k * nq + q] = query_value(ctx, m.queries[q], -1);
  });

  PosteriorEstimate out = combine_weighted_samples(
      rec.d, rec.logw, rec.f, nq, mode == WeightMode::lexicographic,
      options.trace_points);
  for (int q = 0; q < nq; ++q) out.queries[q].query = m.queries[q].display;
  return out;
}

}  // namespace

PosteriorEstimate llw_run(const Model& m, std::int64_t samples,
                          const InferOptions& options) {
  return lw_family_run(m, samples, options, WeightMode::lexicographic);
}

PosteriorEstimate naive_lw_run(const Model& m, std::int64_t samples,
                               const InferOptions& options) {
  return lw_family_run(m, samples, options, WeightMode::naive);
}

// ---------------------------------------------------------------------------
// iterative refinement

PosteriorEstimate irlw_run(const Model& m, std::int64_t samples, int refine_n,
                           const InferOptions& options) {
  check_lw_preconditions(m);
  if (samples < 1) fail(ErrorCode::precondition, "sample count must be >= 1");
  if (refine_n < 1)
    fail(ErrorCode::precondition, "refinement level must be >= 1");
  for (const EvidenceDecl& e : m.evidence)
    if (m.random_fns[e.fn].ret_type != kTypeReal &&
        m.random_fns[e.fn].ret_type != kTypeInt)
      fail(ErrorCode::precondition, "IRLW requires real evidence");

  const int nq = static_cast<int>(m.queries.size());
  LwRecords rec;
  rec.d.assign(samples, 0);
  rec.logw.assign(samples, 0.0);
  rec.f.assign(samples * nq, 0.0);

  auto table = std::make_shared<RvTable>(options.threads > 1);
  std::vector<std::int32_t> prepared = prepare_evidence(m, table);
  parallel_units(samples, options.threads, [&](std::int64_t k) {
    Rng rng = substream(options.seed, static_cast<std::uint64_t>(k));
    SamplingDriver driver(rng);
    World world(table);
    WorldContext ctx(m, world, driver);

    std::size_t n_ev = m.evidence.size();
    std::vector<BasicRV> dynamic_rvs(n_ev);
    std::vector<char> is_null(n_ev, 0);
    for (std::size_t i = 0; i < n_ev; ++i) {
      if (prepared[i] >= 0)
        ctx.clamp_id(prepared[i], m.evidence[i].observed);
      else if (ctx.resolve_application(m.evidence[i], dynamic_rvs[i]))
        ctx.clamp(dynamic_rvs[i], m.evidence[i].observed);
      else
        is_null[i] = 1;
    }
    double logw = 0.0;
    for (std::size_t i = 0; i < n_ev; ++i) {
      if (is_null[i]) {
        logw = kNegInf;
        continue;
      }
      const BasicRV& rv =
          prepared[i] >= 0 ? table->def(prepared[i]) : dynamic_rvs[i];
      Kernel kern = ctx.kernel_for(rv);
      double p = cell_probability(kern, m.evidence[i].observed.to_real(),
                                  refine_n);
      logw += p > 0.0 ? std::log(p) : kNegInf;
    }
    rec.logw[k] = logw;
    for (int q = 0; q < nq; ++q)
      rec.f[k * nq + q] = query_value(ctx, m.queries[q], -1);
  });

  PosteriorEstimate out = combine_weighted_samples(rec.d, rec.logw, rec.f, nq,
                                                   false, options.trace_points);
  for (int q = 0; q < nq; ++q) out.queries[q].query = m.queries[q].display;
  return out;
}

// ---------------------------------------------------------------------------
// particle filters

namespace {

std::vector<std::int64_t> resample_indices(std::span<const double> weights,
                                           std::int64_t count, Rng& rng,
                                           ResampleKind kind) {
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    cumulative[i] = total;
  }
  std::vector<std::int64_t> out(count);
  auto pick = [&](double u) -> std::int64_t {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * total);
    return std::min<std::int64_t>(cumulative.end() - 1 - cumulative.begin(),
                                  it - cumulative.begin());
  };
  if (kind == ResampleKind::multinomial) {
    for (std::int64_t j = 0; j < count; ++j) out[j] = pick(rng.next_double());
  } else {
    double step = 1.0 / static_cast<double>(count);
    double u = rng.next_double() * step;
    for (std::int64_t j = 0; j < count; ++j)
      out[j] = pick(u + step * static_cast<double>(j));
  }
  return out;
}

std::vector<PosteriorEstimate> pf_family_run(const Model& m,
                                             std::int64_t particles,
                                             const InferOptions& options,
                                             WeightMode mode) {
  if (!m.timestep_indexed)
    fail(ErrorCode::precondition, "model is not timestep-indexed");
  if (particles < 1)
    fail(ErrorCode::precondition, "particle count must be >= 1");
  if (m.queries.empty())
    fail(ErrorCode::precondition, "model has no queries");

  const int T = m.max_evidence_timestep;
  const int nq = static_cast<int>(m.queries.size());
  std::vector<std::vector<int>> evidence_at(T + 1);
  for (std::size_t i = 0; i < m.evidence.size(); ++i)
    evidence_at[m.evidence[i].timestep].push_back(static_cast<int>(i));

  auto table = std::make_shared<RvTable>(options.threads > 1);
  std::vector<std::int32_t> prepared = prepare_evidence(m, table);
  std::vector<World> worlds(particles, World(table));

  std::vector<int> d(particles);
  std::vector<double> logw(particles);
  std::vector<double> f(particles * nq);
  std::vector<PosteriorEstimate> out;
  const bool lexicographic = mode == WeightMode::lexicographic;

  for (int t = 0; t <= T; ++t) {
    parallel_units(particles, options.threads, [&](std::int64_t k) {
      Rng rng = substream(options.seed,
                          static_cast<std::uint64_t>(t) *
                                  static_cast<std::uint64_t>(particles) +
                              static_cast<std::uint64_t>(k));
      SamplingDriver driver(rng);
      WorldContext ctx(m, worlds[k], driver);
      LexWeight lw;
      for (int ei : evidence_at[t]) {
        const EvidenceDecl& e = m.evidence[ei];
        BasicRV dynamic_rv;
        LikelihoodTerm term = LikelihoodTerm::mass(0.0);
        if (prepared[ei] >= 0) {
          ctx.clamp_id(prepared[ei], e.observed);
          term = ctx.likelihood(table->def(prepared[ei]), e.observed);
        } else if (ctx.resolve_application(e, dynamic_rv)) {
          ctx.clamp(dynamic_rv, e.observed);
          term = ctx.likelihood(dynamic_rv, e.observed);
        }
        if (lexicographic)
          lw = update_lexweight(lw, term);
        else
          lw.logw += term.value > 0.0 ? std::log(term.value) : kNegInf;
      }
      d[k] = lw.d;
      logw[k] = lw.logw;
      for (int q = 0; q < nq; ++q)
        f[k * nq + q] = query_value(ctx, m.queries[q], t);
    });

    if (lexicographic) {
      int d_star = -1;
      for (std::int64_t k = 0; k < particles; ++k)
        if (logw[k] != kNegInf && (d_star < 0 || d[k] < d_star)) d_star = d[k];
      if (d_star < 0)
        fail(ErrorCode::degeneracy,
             "all particles have zero weight at timestep " + std::to_string(t));
      for (std::int64_t k = 0; k < particles; ++k)
        if (d[k] > d_star) logw[k] = kNegInf;
    } else {
      bool any = false;
      for (std::int64_t k = 0; k < particles; ++k)
        if (logw[k] != kNegInf) any = true;
      if (!any)
        fail(ErrorCode::degeneracy,
             "all particles have zero weight at timestep " + std::to_string(t));
    }

    PosteriorEstimate step =
        combine_weighted_samples(d, logw, f, nq, lexicographic, 0);
    step.t = t;
    for (int q = 0; q < nq; ++q) step.queries[q].query = m.queries[q].display;
    out.push_back(std::move(step));

    // resample K particles by weight
    double max_log = kNegInf;
    for (std::int64_t k = 0; k < particles; ++k)
      max_log = std::max(max_log, logw[k]);
    std::vector<double> w(particles);
    for (std::int64_t k = 0; k < particles; ++k)
      w[k] = logw[k] == kNegInf ? 0.0 : std::exp(logw[k] - max_log);
    Rng rrng = substream(options.seed,
                         0x8000000000000000ULL + static_cast<std::uint64_t>(t));
    std::vector<std::int64_t> parents =
        resample_indices(w, particles, rrng, options.resample);
    std::vector<World> next;
    next.reserve(particles);
    for (std::int64_t j = 0; j < particles; ++j)
      next.push_back(worlds[parents[j]]);
    worlds = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<PosteriorEstimate> lpf_run(const Model& m, std::int64_t particles,
                                       const InferOptions& options) {
  return pf_family_run(m, particles, options, WeightMode::lexicographic);
}

std::vector<PosteriorEstimate> naive_pf_run(const Model& m,
                                            std::int64_t particles,
                                            const InferOptions& options) {
  return pf_family_run(m, particles, options, WeightMode::naive);
}

}  // namespace mixppl
