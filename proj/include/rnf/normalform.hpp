#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rnf/resonance.hpp"

namespace rnf {

/// W = D(lambda) + Z + X + N.
template <class S>
struct DecomposedField {
  VectorField<S> linear;
  /// Diagonal resonant terms of degree 1..M*-1.
  VectorField<S> Z;
  /// I0 + I1 part of order >= M*.
  VectorField<S> X;
  /// I2 part of order >= M*.
  VectorField<S> N;
  int m_star = 0;

  VectorField<S> assemble() const;
};

/// Throws HypothesisViolation naming the first offending term.
template <class S>
DecomposedField<S> decompose(const VectorField<S>& W, const FrequencyModel& model,
                             const ResonanceModule& module, int m_star = 0);

struct Generator {
  std::string kind;  // "prenormal" or "kam"
  int step = 0;
};

/// Generators F_0 .. F_{n-1}; the coordinate change is Phi_{F_0} o ... o Phi_{F_{n-1}}
/// and maps normal form coordinates to the original ones.
template <class S>
struct TransformLog {
  std::vector<VectorField<S>> F;
  std::vector<Generator> info;

  std::size_t size() const { return F.size(); }
  bool empty() const { return F.empty(); }
  void push(VectorField<S> f, Generator g) {
    F.push_back(std::move(f));
    info.push_back(std::move(g));
  }
};

/// Solves [D(lambda), F] = Y coefficientwise. Throws ResonantTermInRange.
template <class S>
VectorField<S> solve_linear_homological(const VectorField<S>& Y, const FrequencyModel& model);

/// Degree-by-degree removal of non-resonant terms of degree < M*.
template <class S>
std::pair<VectorField<S>, TransformLog<S>> prenormalize(const VectorField<S>& W,
                                                        const FrequencyModel& model,
                                                        const ResonanceModule& module,
                                                        int m_star = 0);

/// F in I^(i) with Pi^(i)[F, D + Z + N] = -X_i, where for i = 1 the I0 generator F0
/// contributes Pi^(1)[F0, Z + N] to the right-hand side.
template <class S>
VectorField<S> solve_extended_homological(const VectorField<S>& Xi, int i, const VectorField<S>& Z,
                                          const VectorField<S>& N, const VectorField<S>* F0,
                                          const FrequencyModel& model,
                                          const ResonanceModule& module);

/// exp(ad_F) W = sum_k ad_F^k W / k!, the pull back of W by the time one flow of F.
template <class S>
VectorField<S> pushforward_exp(const VectorField<S>& F, const VectorField<S>& W);

struct KamParams {
  double gamma = 1.0;
  double r_prime = 0.5;
  double s_base = 0.0;
  double s_prime = 1.0;
  double K1 = 1.0;
  double c = 1.0;
  int norm_samples = 32;
};

struct StepRecord {
  int step = 0;
  int ord_X = 0;
  int ord_X_next = 0;
  double r = 0, s = 0, rho = 0, sigma = 0;
  double norm_X = 0, norm_Z = 0, norm_N = 0;
  double eps = 0;
  double Theta = 0;
  double smallness_lhs = 0;
  double smallness_rhs = 0;
  bool smallness_ok = false;
  std::size_t generator_terms = 0;
  bool doubled = false;
};

struct KamTrace {
  std::vector<StepRecord> steps;
  int prenormal_steps = 0;
  /// eps_0 (1 + Theta_0)^7, to be compared with the unknown constant K^{-1}.
  double initial_gianna = 0;
};

template <class S>
struct StepResult {
  DecomposedField<S> next;
  VectorField<S> F;
  StepRecord record;
};

/// One quadratic step. Throws AlreadyNormal when X = 0.
template <class S>
StepResult<S> kam_step(const DecomposedField<S>& d, const FrequencyModel& model,
                       const ResonanceModule& module, const KamParams& params = {}, int step = 0);

template <class S>
struct NormalFormResult {
  DecomposedField<S> field;
  TransformLog<S> log;
  KamTrace trace;
};

template <class S>
NormalFormResult<S> normalize(const VectorField<S>& W, const FrequencyModel& model,
                              const ResonanceModule& module, const KamParams& params = {},
                              bool run_prenormalize = true, int m_star = 0);

/// Upper limit on KAM steps from order doubling.
int kam_step_limit(int degree_cutoff, int m_star);

}  // namespace rnf
