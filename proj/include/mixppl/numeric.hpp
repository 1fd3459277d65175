#pragma once

#include <cmath>
#include <limits>

namespace mixppl {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Standard normal density, CDF and quantile.
double norm_pdf(double z);
double norm_cdf(double z);
// Inverse of norm_cdf on (0, 1); p = 0 and p = 1 map to -inf/+inf.
double norm_quantile(double p);

// Poisson pmf and CDF (direct summation, exact enough for lambda <= ~700).
double poisson_pmf(long long k, double lambda);
double poisson_cdf(double x, double lambda);

// log(sum of exp) accumulated one term at a time without overflow.
class LogSumExp {
 public:
  void add(double log_term);
  // log of the running sum; -inf if empty or all terms were -inf.
  double log_sum() const;
  bool empty() const { return count_ == 0; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;  // sum of exp(term - max_)
  long long count_ = 0;
};

}  // namespace mixppl
