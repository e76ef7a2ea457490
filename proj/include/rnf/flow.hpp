#pragma once

#include <boost/multiprecision/float128.hpp>
#include <vector>

#include "rnf/frequency.hpp"
#include "rnf/normalform.hpp"

namespace rnf {

using quad = boost::multiprecision::float128;

/// Polynomial vector field compiled for evaluation on a real state vector
/// (re, im interleaved). The diagonal linear part is kept separately.
template <class Real>
class CompiledField {
 public:
  CompiledField() = default;
  template <class S>
  explicit CompiledField(const VectorField<S>& X);

  std::size_t dim() const { return lin_re_.size(); }
  /// Diagonal linear coefficients lambda_k.
  const std::vector<Real>& linear_re() const { return lin_re_; }
  const std::vector<Real>& linear_im() const { return lin_im_; }

  /// Nonlinear part (every term except the diagonal linear ones).
  void nonlinear(const std::vector<Real>& z, std::vector<Real>& out) const;
  /// Full field.
  void full(const std::vector<Real>& z, std::vector<Real>& out) const;

 private:
  struct Term {
    int k;
    Real re, im;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Term> terms_;
  std::vector<Real> lin_re_, lin_im_;
  std::vector<int> max_exp_;
  mutable std::vector<Real> pow_;
  std::vector<std::size_t> pow_offset_;
};

struct FlowConfig {
  int steps = 1000;
  double horizon = 1.0;
  double blowup = 1e3;
  /// Integrating-factor RK4 that treats the diagonal linear part exactly.
  bool lawson = true;
  /// Steps used for each time one generator flow of a transform.
  int transform_steps = 64;
  /// Record every n-th step in trajectories; 0 records only the end point.
  int record_every = 0;
};

template <class Real>
struct RealFlowResult {
  std::vector<Real> state;
  bool diverged = false;
};

/// Fixed-step RK4 (or Lawson RK4) to time t.
template <class Real>
RealFlowResult<Real> integrate_real(const CompiledField<Real>& f, std::vector<Real> z, Real t,
                                    int steps, bool lawson, double blowup,
                                    std::vector<std::pair<double, std::vector<Real>>>* samples = nullptr,
                                    int record_every = 0);

std::vector<Complex> linear_flow(const FrequencyModel& model, const TruncationContext& ctx,
                                 const std::vector<Complex>& xi, double t);

struct Trajectory {
  std::vector<std::pair<double, std::vector<Complex>>> samples;
  std::vector<Complex> final_state;
  bool diverged = false;
  /// |x_h - x_{h/2}| at the final time.
  double error_estimate = 0.0;
};

template <class S>
Trajectory integrate_flow(const VectorField<S>& W, const std::vector<Complex>& x0, double t,
                          const FlowConfig& config);

enum class Direction { forward, inverse };

/// forward: Phi_{F_0} o ... o Phi_{F_{n-1}} (F_{n-1} applied first); inverse: time -1
/// flows in reverse order.
template <class S>
std::vector<Complex> apply_transform(const TransformLog<S>& log, const std::vector<Complex>& x,
                                     Direction direction, int steps = 64);

template <class Real, class S>
std::vector<Real> apply_transform_real(const TransformLog<S>& log, std::vector<Real> x,
                                       Direction direction, int steps);

/// |Phi_t^{W0}(Psi(xi)) - Psi(x_lin(xi, t))| evaluated in 113-bit arithmetic, where Psi
/// maps normal form coordinates to the original ones and x_lin uses the linear part of W0.
template <class S>
double conjugacy_error(const VectorField<S>& W0, const TransformLog<S>& log,
                       const std::vector<Complex>& xi, double t, const FlowConfig& config);

std::vector<double> to_real_state(const std::vector<Complex>& x);
std::vector<Complex> from_real_state(const std::vector<double>& z);

}  // namespace rnf
