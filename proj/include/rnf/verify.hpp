#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rnf/flow.hpp"

namespace rnf {

/// Sigma = {x : x^{Q_i} = 0 for all i}. Points on Sigma are produced by zeroing
/// one coordinate from the support of each generator.
struct SigmaSpec {
  std::vector<MultiIndex> generators;
  std::vector<ModeKey> zeroed;

  static SigmaSpec from_module(const ResonanceModule& module);
  bool contains(const std::vector<Complex>& x, const TruncationContext& ctx, double tol = 0.0) const;
  std::vector<Complex> project(std::vector<Complex> x, const TruncationContext& ctx) const;
};

struct TangencyReport {
  bool tangent = true;
  std::vector<std::string> offending;
};

/// Every term beyond D(lambda) and the diagonal resonant terms of degree < M* must lie in J2.
template <class S>
TangencyReport check_tangent_sigma(const VectorField<S>& W, const FrequencyModel& model,
                                   const ResonanceModule& module, int m_star = 0);

struct ScalingRow {
  double rho = 0.0;
  double on_sigma = 0.0;
  double off_sigma = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double slope_on = 0.0;
  double slope_off = 0.0;
};

/// Least squares slope of log(error) against log(rho).
double loglog_slope(const std::vector<double>& rho, const std::vector<double>& err);

/// Conjugacy error at xi = rho u for seeded unit directions u on and off Sigma,
/// summed over `directions` points per row.
template <class S>
ScalingReport conjugacy_scaling(const VectorField<S>& W0, const TransformLog<S>& log,
                                const SigmaSpec& sigma, const std::vector<double>& rhos, double t,
                                const FlowConfig& config, std::uint64_t seed = 1, int directions = 2);

/// Built problem instance.
template <class S>
struct Example {
  TruncationContext ctx;
  FrequencyModel model;
  VectorField<S> W;
};

/// lambda = (2, 1, z1, -z1, z2, -z2) plus a seeded perturbation: diagonal resonant
/// terms x3 x4 x_k d_k, x5 x6 x_k d_k and random terms of degree 4..min(6, D).
/// Seed 0 gives D(lambda).
template <class S>
Example<S> build_example_dim6(double zeta1, double zeta2, std::uint64_t seed, int degree_cutoff = 8);

/// The four-variable frequency vector (2, 1, z, -z) without perturbation.
template <class S>
Example<S> build_example_dim4(double zeta, int degree_cutoff = 8);

/// Nonlinear Schroedinger truncation with lambda_(j,s) = i s (j^2 + V_j) and the
/// nonlinearity i s (z^{p+1} w^p)_j.
template <class S>
Example<S> build_example_nls(int p, const std::map<int, Rational>& V, int cutoff, int degree_cutoff);

/// lambda_(j,s) = s (j^2 + V_j) for hyperbolic j, i s (j^2 + V_j) for j in `elliptic`;
/// the perturbation is the Hamiltonian-type field of a seeded momentum-zero polynomial.
template <class S>
Example<S> build_example_hyperbolic(const std::map<int, Rational>& V, int cutoff, int degree_cutoff,
                                    std::uint64_t seed, const std::set<int>& elliptic = {});

/// Default potential V_j = 1 / (j^2 + 3) + j^3 / 1009, generic enough to avoid numeric collisions.
std::map<int, Rational> default_potential(int cutoff);

}  // namespace rnf
