#include "mixppl/dist.hpp"

#include <algorithm>
#include <cmath>

#include "mixppl/numeric.hpp"

namespace mixppl {

namespace {

constexpr double kWeightSumTol = 1e-9;
constexpr double kMaxPoissonRate = 1e6;

double gaussian_pdf(double x, double mean, double variance) {
  double sd = std::sqrt(variance);
  return norm_pdf((x - mean) / sd) / sd;
}

struct TruncNorm {
  double mean, sd, lo, hi, z_lo, z_hi;  // z_* = Phi at standardized bounds
  double mass;                          // z_hi - z_lo
};

TruncNorm trunc_parts(const Kernel& k) {
  TruncNorm t;
  t.mean = k.a;
  t.sd = std::sqrt(k.b);
  t.lo = k.c;
  t.hi = k.d;
  t.z_lo = norm_cdf((t.lo - t.mean) / t.sd);
  t.z_hi = norm_cdf((t.hi - t.mean) / t.sd);
  t.mass = t.z_hi - t.z_lo;
  return t;
}

double continuous_pdf(const Kernel& k, double x) {
  switch (k.kind) {
    case KernelKind::gaussian:
      return gaussian_pdf(x, k.a, k.b);
    case KernelKind::trunc_gauss: {
      if (x < k.c || x > k.d) return 0.0;
      TruncNorm t = trunc_parts(k);
      return norm_pdf((x - t.mean) / t.sd) / (t.sd * t.mass);
    }
    case KernelKind::unif:
      return (x >= k.a && x <= k.b) ? 1.0 / (k.b - k.a) : 0.0;
    default:
      fail(ErrorCode::unsupported, "kernel has no density");
  }
}

}  // namespace

Kernel make_gaussian(double mean, double variance) {
  if (!(variance > 0.0))
    fail(ErrorCode::invalid_params, "Gaussian variance must be > 0");
  Kernel k;
  k.kind = KernelKind::gaussian;
  k.a = mean;
  k.b = variance;
  return k;
}

Kernel make_trunc_gauss(double mean, double variance, double lo, double hi) {
  if (!(variance > 0.0))
    fail(ErrorCode::invalid_params, "TruncatedGauss variance must be > 0");
  if (!(lo < hi))
    fail(ErrorCode::invalid_params, "TruncatedGauss bounds inverted");
  Kernel k;
  k.kind = KernelKind::trunc_gauss;
  k.a = mean;
  k.b = variance;
  k.c = lo;
  k.d = hi;
  if (!(trunc_parts(k).mass > 0.0))
    fail(ErrorCode::invalid_params,
         "TruncatedGauss truncation interval carries no mass");
  return k;
}

Kernel make_poisson(double rate) {
  if (!(rate >= 0.0))
    fail(ErrorCode::invalid_params, "Poisson rate must be >= 0");
  if (rate > kMaxPoissonRate)
    fail(ErrorCode::invalid_params, "Poisson rate too large");
  Kernel k;
  k.kind = KernelKind::poisson;
  k.a = rate;
  return k;
}

Kernel make_boolean(double p_true) {
  if (!(p_true >= 0.0 && p_true <= 1.0))
    fail(ErrorCode::invalid_params, "BooleanDistrib parameter outside [0,1]");
  Kernel k;
  k.kind = KernelKind::boolean;
  k.a = p_true;
  return k;
}

Kernel make_unif(double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::invalid_params, "Unif bounds inverted");
  Kernel k;
  k.kind = KernelKind::unif;
  k.a = lo;
  k.b = hi;
  return k;
}

Kernel make_uniform_choice(std::vector<Value> candidates) {
  Kernel k;
  k.kind = KernelKind::uniform_choice;
  k.candidates = std::move(candidates);
  return k;
}

Kernel make_categorical(std::vector<std::pair<Value, double>> entries) {
  if (entries.empty())
    fail(ErrorCode::invalid_params, "Categorical needs at least one entry");
  double total = 0.0;
  for (const auto& [value, mass] : entries) {
    if (!(mass >= 0.0))
      fail(ErrorCode::invalid_params, "Categorical weight must be >= 0");
    total += mass;
  }
  if (std::fabs(total - 1.0) > kWeightSumTol)
    fail(ErrorCode::weight_sum, "Categorical weights do not sum to 1");
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (value_eq(entries[i].first, entries[j].first))
        fail(ErrorCode::invalid_params, "Categorical values must be distinct");
  Kernel k;
  k.kind = KernelKind::categorical;
  k.atoms = std::move(entries);
  return k;
}

Kernel make_atom(Value location) {
  Kernel k;
  k.kind = KernelKind::atom;
  k.atoms.emplace_back(std::move(location), 1.0);
  return k;
}

Kernel make_mixture(std::vector<std::pair<Value, double>> atoms,
                    std::vector<Kernel> parts, std::vector<double> weights) {
  if (parts.size() != weights.size())
    fail(ErrorCode::invalid_params, "Mix component/weight count mismatch");
  double total = 0.0;
  for (const auto& [value, mass] : atoms) {
    if (!(mass >= 0.0))
      fail(ErrorCode::invalid_params, "Mix atom weight must be >= 0");
    total += mass;
  }
  for (double w : weights) {
    if (!(w >= 0.0))
      fail(ErrorCode::invalid_params, "Mix component weight must be >= 0");
    total += w;
  }
  if (std::fabs(total - 1.0) > kWeightSumTol)
    fail(ErrorCode::weight_sum, "Mix weights do not sum to 1");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (value_eq(atoms[i].first, atoms[j].first))
        fail(ErrorCode::invalid_params, "Mix atom locations must be distinct");
  for (const Kernel& part : parts) {
    switch (part.kind) {
      case KernelKind::gaussian:
      case KernelKind::trunc_gauss:
      case KernelKind::unif:
        break;
      default:
        fail(ErrorCode::invalid_params,
             "Mix components must be continuous distributions");
    }
  }
  Kernel k;
  k.kind = KernelKind::mixture;
  k.atoms = std::move(atoms);
  k.parts = std::move(parts);
  k.part_weights = std::move(weights);
  return k;
}

Value sample_kernel(const Kernel& k, Rng& rng) {
  switch (k.kind) {
    case KernelKind::gaussian:
      return Value(k.a + std::sqrt(k.b) * norm_quantile(rng.next_double()));
    case KernelKind::trunc_gauss: {
      TruncNorm t = trunc_parts(k);
      double u = t.z_lo + rng.next_double() * t.mass;
      double x = t.mean + t.sd * norm_quantile(u);
      return Value(std::clamp(x, t.lo, t.hi));
    }
    case KernelKind::poisson: {
      // inverse-CDF by sequential search; one uniform per draw
      double u = rng.next_double();
      double term = std::exp(-k.a);
      double total = term;
      long long i = 0;
      while (u >= total) {
        ++i;
        term *= k.a / static_cast<double>(i);
        total += term;
        if (term <= 0.0) break;  // tail exhausted by underflow
      }
      return Value(static_cast<std::int64_t>(i));
    }
    case KernelKind::boolean:
      return Value(rng.next_double() < k.a);
    case KernelKind::unif:
      return Value(k.a + rng.next_double() * (k.b - k.a));
    case KernelKind::uniform_choice: {
      if (k.candidates.empty()) return Value::null();
      return k.candidates[rng.next_below(k.candidates.size())];
    }
    case KernelKind::categorical: {
      double u = rng.next_double();
      double acc = 0.0;
      for (const auto& [value, mass] : k.atoms) {
        acc += mass;
        if (u < acc) return value;
      }
      return k.atoms.back().first;
    }
    case KernelKind::atom:
      return k.atoms.front().first;
    case KernelKind::mixture: {
      double u = rng.next_double();
      double acc = 0.0;
      for (const auto& [value, mass] : k.atoms) {
        acc += mass;
        if (u < acc) return value;
      }
      for (std::size_t i = 0; i < k.parts.size(); ++i) {
        acc += k.part_weights[i];
        if (u < acc) return sample_kernel(k.parts[i], rng);
      }
      if (!k.parts.empty()) return sample_kernel(k.parts.back(), rng);
      return k.atoms.back().first;
    }
  }
  fail(ErrorCode::unsupported, "unknown kernel kind");
}

LikelihoodTerm evaluate_at(const Kernel& k, const Value& x, double atom_tol) {
  switch (k.kind) {
    case KernelKind::gaussian:
    case KernelKind::unif:
    case KernelKind::trunc_gauss: {
      if (!x.is_numeric()) return LikelihoodTerm::density(0.0);
      return LikelihoodTerm::density(continuous_pdf(k, x.to_real()));
    }
    case KernelKind::poisson: {
      if (x.is_int()) return LikelihoodTerm::mass(poisson_pmf(x.as_int(), k.a));
      if (x.is_real()) {
        double r = x.as_real();
        double rounded = std::nearbyint(r);
        if (r == rounded && rounded >= 0)
          return LikelihoodTerm::mass(
              poisson_pmf(static_cast<long long>(rounded), k.a));
      }
      return LikelihoodTerm::mass(0.0);
    }
    case KernelKind::boolean: {
      if (!x.is_bool()) return LikelihoodTerm::mass(0.0);
      return LikelihoodTerm::mass(x.as_bool() ? k.a : 1.0 - k.a);
    }
    case KernelKind::uniform_choice: {
      if (k.candidates.empty())
        return LikelihoodTerm::mass(x.is_null() ? 1.0 : 0.0);
      std::size_t matches = 0;
      for (const Value& candidate : k.candidates)
        if (value_eq(candidate, x, atom_tol)) ++matches;
      return LikelihoodTerm::mass(static_cast<double>(matches) /
                                  static_cast<double>(k.candidates.size()));
    }
    case KernelKind::categorical:
    case KernelKind::atom: {
      for (const auto& [value, mass] : k.atoms)
        if (value_eq(value, x, atom_tol)) return LikelihoodTerm::mass(mass);
      return LikelihoodTerm::mass(0.0);
    }
    case KernelKind::mixture: {
      for (const auto& [value, mass] : k.atoms)
        if (value_eq(value, x, atom_tol)) return LikelihoodTerm::mass(mass);
      if (k.parts.empty()) return LikelihoodTerm::mass(0.0);
      if (!x.is_numeric()) return LikelihoodTerm::density(0.0);
      double f = 0.0;
      for (std::size_t i = 0; i < k.parts.size(); ++i)
        f += k.part_weights[i] * continuous_pdf(k.parts[i], x.to_real());
      return LikelihoodTerm::density(f);
    }
  }
  fail(ErrorCode::unsupported, "unknown kernel kind");
}

double continuous_density(const Kernel& k, double x) {
  switch (k.kind) {
    case KernelKind::gaussian:
    case KernelKind::trunc_gauss:
    case KernelKind::unif:
      return continuous_pdf(k, x);
    case KernelKind::mixture: {
      if (k.parts.empty())
        fail(ErrorCode::unsupported, "kernel has no continuous part");
      double f = 0.0;
      for (std::size_t i = 0; i < k.parts.size(); ++i)
        f += k.part_weights[i] * continuous_pdf(k.parts[i], x);
      return f;
    }
    default:
      fail(ErrorCode::unsupported, "kernel has no continuous part");
  }
}

bool kernel_real_valued(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::gaussian:
    case KernelKind::trunc_gauss:
    case KernelKind::poisson:
    case KernelKind::unif:
      return true;
    case KernelKind::boolean:
      return false;
    case KernelKind::uniform_choice:
      return false;
    case KernelKind::categorical:
    case KernelKind::atom:
    case KernelKind::mixture: {
      for (const auto& [value, mass] : k.atoms)
        if (!value.is_numeric()) return false;
      return true;
    }
  }
  return false;
}

bool kernel_discrete(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::poisson:
    case KernelKind::boolean:
    case KernelKind::uniform_choice:
    case KernelKind::categorical:
    case KernelKind::atom:
      return true;
    case KernelKind::mixture:
      return k.parts.empty();
    default:
      return false;
  }
}

bool kernel_has_cdf(const Kernel& k) { return kernel_real_valued(k); }

double cdf_at(const Kernel& k, double x) {
  switch (k.kind) {
    case KernelKind::gaussian:
      return norm_cdf((x - k.a) / std::sqrt(k.b));
    case KernelKind::trunc_gauss: {
      if (x < k.c) return 0.0;
      if (x >= k.d) return 1.0;
      TruncNorm t = trunc_parts(k);
      return (norm_cdf((x - t.mean) / t.sd) - t.z_lo) / t.mass;
    }
    case KernelKind::poisson:
      return poisson_cdf(x, k.a);
    case KernelKind::unif: {
      if (x < k.a) return 0.0;
      if (x >= k.b) return 1.0;
      return (x - k.a) / (k.b - k.a);
    }
    case KernelKind::categorical:
    case KernelKind::atom:
    case KernelKind::mixture: {
      if (!kernel_real_valued(k))
        fail(ErrorCode::unsupported, "cdf_at requires a real-valued kernel");
      double total = 0.0;
      for (const auto& [value, mass] : k.atoms)
        if (value.to_real() <= x) total += mass;
      for (std::size_t i = 0; i < k.parts.size(); ++i)
        total += k.part_weights[i] * cdf_at(k.parts[i], x);
      return total;
    }
    default:
      fail(ErrorCode::unsupported, "cdf_at requires a real-valued kernel");
  }
}

std::vector<std::pair<Value, double>> kernel_support(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::boolean:
      return {{Value(true), k.a}, {Value(false), 1.0 - k.a}};
    case KernelKind::uniform_choice: {
      if (k.candidates.empty()) return {{Value::null(), 1.0}};
      double p = 1.0 / static_cast<double>(k.candidates.size());
      std::vector<std::pair<Value, double>> out;
      out.reserve(k.candidates.size());
      for (const Value& candidate : k.candidates) out.emplace_back(candidate, p);
      return out;
    }
    case KernelKind::categorical:
    case KernelKind::atom:
      return k.atoms;
    case KernelKind::mixture:
      if (k.parts.empty()) return k.atoms;
      fail(ErrorCode::unsupported,
           "kernel with a continuous part has no finite support");
    case KernelKind::poisson:
      fail(ErrorCode::unsupported, "Poisson support is unbounded");
    default:
      fail(ErrorCode::unsupported, "kernel is not finite-support discrete");
  }
}

std::vector<BuiltinInfo> builtin_catalog() {
  return {
      {"Gaussian", KernelKind::gaussian, 2, true, false},
      {"TruncatedGauss", KernelKind::trunc_gauss, 4, true, false},
      {"Poisson", KernelKind::poisson, 1, true, true},
      {"BooleanDistrib", KernelKind::boolean, 1, false, true},
      {"Unif", KernelKind::unif, 2, true, false},
      {"UniformChoice", KernelKind::uniform_choice, 1, false, true},
      {"Categorical", KernelKind::categorical, 1, false, true},
      {"PointMass", KernelKind::atom, 1, false, true},
      {"Mix", KernelKind::mixture, 1, false, false},
  };
}

}  // namespace mixppl
