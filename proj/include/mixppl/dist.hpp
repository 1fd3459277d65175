#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixppl/errors.hpp"
#include "mixppl/rng.hpp"
#include "mixppl/value.hpp"

namespace mixppl {

// Result of evaluating an observed value against a kernel: either the
// probability mass of an atom at that point, or the density of the
// continuous part there. Never both for one value.
struct LikelihoodTerm {
  enum class Tag { mass, density };
  Tag tag;
  double value;

  bool is_mass() const { return tag == Tag::mass; }
  bool is_density() const { return tag == Tag::density; }

  static LikelihoodTerm mass(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorCode::invalid_params, "probability mass outside [0,1]");
    return {Tag::mass, p};
  }
  static LikelihoodTerm density(double f) {
    if (!(f >= 0.0))
      fail(ErrorCode::invalid_params, "negative density");
    return {Tag::density, f};
  }
};

enum class KernelKind {
  gaussian,        // mean, variance
  trunc_gauss,     // mean, variance, lo, hi
  poisson,         // rate
  boolean,         // p(true)
  unif,            // lo, hi
  uniform_choice,  // uniform over a candidate list; null if empty
  categorical,     // finite list of (value, mass)
  atom,            // point mass
  mixture,         // atoms plus weighted continuous components
};

// A distribution with its parameters already bound to values.
struct Kernel {
  KernelKind kind = KernelKind::atom;
  double a = 0, b = 0, c = 0, d = 0;  // scalar parameters, meaning per kind
  std::vector<std::pair<Value, double>> atoms;  // categorical/atom/mixture
  std::vector<Kernel> parts;                    // mixture components
  std::vector<double> part_weights;
  std::vector<Value> candidates;  // uniform_choice
};

Kernel make_gaussian(double mean, double variance);
Kernel make_trunc_gauss(double mean, double variance, double lo, double hi);
Kernel make_poisson(double rate);
Kernel make_boolean(double p_true);
Kernel make_unif(double lo, double hi);
Kernel make_uniform_choice(std::vector<Value> candidates);
Kernel make_categorical(std::vector<std::pair<Value, double>> entries);
Kernel make_atom(Value location);
// Atom masses plus continuous components; all weights must sum to 1 within
// 1e-9 and atom locations must be pairwise distinct.
Kernel make_mixture(std::vector<std::pair<Value, double>> atoms,
                    std::vector<Kernel> parts, std::vector<double> weights);

Value sample_kernel(const Kernel& k, Rng& rng);

// Mass(F(x)) if x matches an atom under the atom-equality rule (exact float
// equality, or |x - loc| <= atom_tol when atom_tol > 0); otherwise the
// density of the continuous part at x. Purely discrete kernels always
// return Mass; off-support evaluation of a kernel with a continuous part
// returns Density(0).
LikelihoodTerm evaluate_at(const Kernel& k, const Value& x,
                           double atom_tol = 0.0);

bool kernel_real_valued(const Kernel& k);
bool kernel_discrete(const Kernel& k);
bool kernel_has_cdf(const Kernel& k);

// P(Y <= x), atoms at locations <= x included. Throws unsupported for
// kernels that are not real-valued.
double cdf_at(const Kernel& k, double x);

// Density of the continuous part at x (atoms of a mixture contribute
// nothing). Throws unsupported for kernels without a continuous part.
double continuous_density(const Kernel& k, double x);

// Finite discrete support as (value, mass) in a deterministic order.
// Throws unsupported for kernels with a continuous part or infinite support.
std::vector<std::pair<Value, double>> kernel_support(const Kernel& k);

struct BuiltinInfo {
  std::string name;
  KernelKind kind;
  int arity;         // -1: variable
  bool real_valued;  // cdf_at available when parameters are real
  bool discrete;
};

// Every builtin distribution the language exposes.
std::vector<BuiltinInfo> builtin_catalog();

}  // namespace mixppl
