#pragma once

#include <map>
#include <optional>
#include <vector>

#include "rnf/frequency.hpp"

namespace rnf {

enum class Ideal { J0, J1, J2 };

const char* ideal_name(Ideal j);

/// Resonance data of a frequency vector inside the window ||q|| <= window.
struct ResonanceModule {
  int window = 0;
  /// Generators Q_i of M_lambda in degree order.
  std::vector<MultiIndex> Q;
  /// Generators P_j of Delta_lambda \ M_lambda for each direction k.
  std::map<ModeKey, std::vector<SignedIndex>> P;
  /// Nonzero elements of M_lambda in the window.
  std::vector<MultiIndex> kernel;
  /// Resonant monomial fields x^q d/dx_k with 2 <= ||q|| <= window.
  std::vector<TermKey> resonant;
  int M = 0;
  int M1 = 0;
  int M_star_bound = 0;
  int M_star_minimal = 1;
  /// The window reaches the sufficient bound, so M_star_minimal is exact.
  bool certified = false;
  bool delta_equals_m = true;

  Ideal classify(const MultiIndex& q) const;
  bool in_kernel_list(const MultiIndex& q) const;
  bool in_resonant_list(ModeKey k, const MultiIndex& q) const;
};

/// Enumerates M_lambda and Delta_lambda up to degree D + 1 and extracts generators.
/// Throws UniqueFactorizationViolation or CutoffTooSmall.
ResonanceModule enumerate_resonance(const TruncationContext& ctx, const FrequencyModel& model,
                                    int threads = 1);

Ideal classify(const MultiIndex& q, const ResonanceModule& module);

/// lambda . (q - e_k), exact over the symbol basis.
SymbolicValue divisor(const FrequencyModel& model, const MultiIndex& q, ModeKey k);
bool is_resonant(const FrequencyModel& model, const TruncationContext& ctx, const MultiIndex& q,
                 ModeKey k);

template <class S>
struct IdealSplit {
  VectorField<S> X0, X1, X2;
};

template <class S>
IdealSplit<S> split_ideals(const VectorField<S>& X, const ResonanceModule& module);

struct DiophantineReport {
  double tau = 0.0;
  int degree_bound = 0;
  int mode_cutoff = 0;
  /// +infinity when nothing was enumerated.
  double gamma_max = 0.0;
  std::optional<SignedIndex> worst_p;
  double worst_divisor = 0.0;
  long enumerated = 0;
  long excluded_resonant = 0;
  /// Exact zeros of lambda . p that the resonance module does not list.
  long classification_mismatches = 0;

  bool fast_path_requested = false;
  bool fast_path_available = false;
  /// max |lambda_k - <k>^alpha e^{i phi_k}|; the fast path needs it <= 1/2.
  double reference_defect = 0.0;
  long premise_count = 0;
  /// Premise holds but |lambda . p| < 1.
  long premise_violations = 0;
  std::optional<SignedIndex> premise_violation_example;
  double premise_min_divisor = 0.0;
  long skipped = 0;
};

DiophantineReport diophantine_audit(const TruncationContext& ctx, const FrequencyModel& model,
                                    const ResonanceModule& module, double tau, int degree_bound,
                                    bool fast_path = true);

struct SmallDivisorReport {
  double delta = 0.0;
  double c = 1.0;
  int degree_bound = 0;
  long examined = 0;
  /// Largest e^{-delta E(q,k)} / |lambda.q - lambda_k| per degree ||q||.
  std::map<int, double> shell_max;
  double max_value = 0.0;
  std::optional<TermKey> worst;
  double implied_C = 0.0;
  bool growth_flag = false;
  long case0_checked = 0;
  long case0_violations = 0;
};

/// Scans non-resonant momentum-conserving (q,k) with 2 <= ||q|| <= degree_bound.
/// When more than sample_budget pairs exist a deterministic stride subsample is used.
SmallDivisorReport smalldivisor_weight_audit(const TruncationContext& ctx,
                                             const FrequencyModel& model, double delta,
                                             int degree_bound, long sample_budget = 1000000,
                                             std::optional<double> gamma = std::nullopt,
                                             double tau = 2.0, double c = 1.0);

}  // namespace rnf
