#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mixppl/model.hpp"

// Independent oracles for testing the inference engines: exhaustive
// enumeration for finite discrete models, adaptive quadrature for the
// analytic limits, and forward simulation of state-space datasets. The
// engines never link against this code.
namespace mixppl::verify {

struct ExactPosterior {
  std::vector<std::pair<std::string, double>> queries;
  std::int64_t worlds = 0;
};

// Posterior by exhaustive enumeration of consistent worlds, weighted by
// exact joint mass. Every kernel reached must be finite-support discrete;
// throws unsupported otherwise and bound_exceeded past max_worlds.
ExactPosterior exact_posterior_discrete(const Model& m,
                                        std::int64_t max_worlds = 1000000);

// Adaptive-Simpson integral of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-10);

// E over the latent kernel of the observation likelihood at y:
//   integral of latent(v) * evaluate_at(obs_kernel(v), y) dv
// (plus point-mass contributions for atomic latents).
double expected_density_at(const Kernel& latent,
                           const std::function<Kernel(double)>& obs_kernel,
                           double y, double rel_tol = 1e-9);

struct SsmDataset {
  std::string obs_text;  // "obs fn(@t, ...) = value;" lines
  std::vector<std::string> truth_columns;      // "X_true", "Y_true", ...
  std::vector<std::vector<double>> truth_rows;  // [t, values...] per step

  std::string truth_csv() const;
};

// Forward-simulates a timestep-indexed model for timesteps 0..T and emits
// observation statements for every leaf random function (one application per
// object tuple per step) plus the ground-truth trajectory of the query
// functions. Deterministic in the seed.
SsmDataset generate_ssm_dataset(const Model& m, int T, std::uint64_t seed);

}  // namespace mixppl::verify
