#include "mixppl/numeric.hpp"

#include "mixppl/errors.hpp"

namespace mixppl {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kSqrt2 = 1.4142135623730950488;
}  // namespace

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double norm_quantile(double p) {
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return kPosInf;

  // Acklam's rational approximation, then one Halley step against erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  double e = norm_cdf(x) - p;
  double u = e / norm_pdf(x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double poisson_pmf(long long k, double lambda) {
  if (lambda < 0.0) fail(ErrorCode::invalid_params, "Poisson rate < 0");
  if (k < 0) return 0.0;
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  double log_p = static_cast<double>(k) * std::log(lambda) - lambda -
                 std::lgamma(static_cast<double>(k) + 1.0);
  return std::exp(log_p);
}

double poisson_cdf(double x, double lambda) {
  if (lambda < 0.0) fail(ErrorCode::invalid_params, "Poisson rate < 0");
  if (x < 0.0) return 0.0;
  long long k = static_cast<long long>(std::floor(x));
  double total = 0.0;
  // recurrence keeps pmf terms exact relative to each other
  double term = std::exp(-lambda);
  for (long long i = 0; i <= k; ++i) {
    if (i > 0) term *= lambda / static_cast<double>(i);
    total += term;
    if (term < 1e-18 && static_cast<double>(i) > lambda) break;
  }
  return total < 1.0 ? total : 1.0;
}

void LogSumExp::add(double log_term) {
  ++count_;
  if (log_term == kNegInf) return;
  if (log_term <= max_) {
    sum_ += std::exp(log_term - max_);
  } else {
    if (max_ != kNegInf) sum_ *= std::exp(max_ - log_term);
    sum_ += 1.0;
    max_ = log_term;
  }
}

double LogSumExp::log_sum() const {
  if (max_ == kNegInf) return kNegInf;
  return max_ + std::log(sum_);
}

}  // namespace mixppl
