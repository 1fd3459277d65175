#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixppl/model.hpp"
#include "mixppl/numeric.hpp"

namespace mixppl {

// Pair (d, log w): count of density factors and log weight. Any sample with
// fewer density factors lexicographically dominates one with more.
struct LexWeight {
  int d = 0;
  double logw = 0.0;

  bool zero() const { return logw == kNegInf; }
};

// One evidence update: a positive mass multiplies the weight; a density
// multiplies the weight and increments d. Zero factors send logw to -inf.
LexWeight update_lexweight(LexWeight lw, const LikelihoodTerm& term);

struct TraceRow {
  std::int64_t index;  // samples seen so far (lw engines) or timestep (pf)
  int query;
  double estimate;
};

struct QueryEstimate {
  std::string query;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct PosteriorEstimate {
  int t = -1;  // timestep, for filter outputs
  std::vector<QueryEstimate> queries;
  bool lexicographic = false;
  int d_star = 0;
  std::int64_t population = 0;  // samples drawn / particles carried
  std::int64_t surviving = 0;  // samples/particles contributing to the estimate
  double ess = 0.0;
  std::vector<TraceRow> trace;
};

enum class ResampleKind { multinomial, systematic };

struct InferOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::int64_t trace_points = 0;  // 0: no convergence trace
  ResampleKind resample = ResampleKind::multinomial;
};

// The min-d weighted-mean estimator over per-sample records, shared by all
// engines. With lexicographic=false every record counts (d treated as 0).
// f is row-major: sample k's query q value at f[k * n_queries + q].
PosteriorEstimate combine_weighted_samples(
    std::span<const int> d, std::span<const double> logw,
    std::span<const double> f, int n_queries, bool lexicographic,
    std::int64_t trace_points = 0);

// Lexicographic likelihood weighting: prior-samples ancestors of the
// evidence and queries, folds every evidence node through update_lexweight,
// keeps only minimum-d samples.
PosteriorEstimate llw_run(const Model& m, std::int64_t samples,
                          const InferOptions& options = {});

// Classical likelihood weighting: masses and densities multiplied without
// distinction.
PosteriorEstimate naive_lw_run(const Model& m, std::int64_t samples,
                               const InferOptions& options = {});

// Iterative-refinement reference sampler: weights prior samples by the
// probability of the dyadic cell of width 2^-n around each observation.
PosteriorEstimate irlw_run(const Model& m, std::int64_t samples, int refine_n,
                           const InferOptions& options = {});

// Lexicographic particle filter over a timestep-indexed model: per-step
// (d, w) updates, non-minimal-d particles discarded before resampling.
std::vector<PosteriorEstimate> lpf_run(const Model& m, std::int64_t particles,
                                       const InferOptions& options = {});

// Bootstrap particle filter with naive weights.
std::vector<PosteriorEstimate> naive_pf_run(const Model& m,
                                            std::int64_t particles,
                                            const InferOptions& options = {});

// Dyadic refinement map: 2^-n * ceil(2^n * y).
double alpha_n(double y, int n);

// P(alpha_n(y) - 2^-n < Y <= alpha_n(y)) from the kernel CDF.
double cell_probability(const Kernel& k, double y, int n);

}  // namespace mixppl
