#include "rnf/flow.hpp"

#include <cmath>

#include "rnf/errors.hpp"

namespace rnf {

namespace {

template <class Real>
Real rational_to(const Rational& q);

template <>
double rational_to<double>(const Rational& q) {
  return q.get_d();
}

template <>
quad rational_to<quad>(const Rational& q) {
  if (sgn(q) == 0) return quad(0);
  mpf_class f(q, 256);
  mp_exp_t e = 0;
  std::string digits = f.get_str(e, 10, 40);
  bool neg = !digits.empty() && digits[0] == '-';
  if (neg) digits.erase(0, 1);
  return quad((neg ? "-0." : "0.") + digits + "e" + std::to_string(e));
}

template <class Real>
std::pair<Real, Real> coefficient_to(const GaussianRational& c) {
  return {rational_to<Real>(c.re), rational_to<Real>(c.im)};
}

template <class Real>
std::pair<Real, Real> coefficient_to(const Complex& c) {
  return {Real(c.real()), Real(c.imag())};
}

template <class Real>
std::pair<Real, Real> cexp(const Real& re, const Real& im) {
  using std::cos;
  using std::exp;
  using std::sin;
  Real m = exp(re);
  return {m * cos(im), m * sin(im)};
}

template <class Real>
bool finite_and_bounded(const std::vector<Real>& z, double bound) {
  Real s = 0;
  for (const auto& v : z) s += v * v;
  double d = static_cast<double>(s);
  return std::isfinite(d) && d <= bound * bound;
}

// z <- e * z componentwise for complex vectors stored as (re, im) pairs.
template <class Real>
void cmul_inplace(const std::vector<Real>& e, std::vector<Real>& z) {
  for (std::size_t i = 0; i + 1 < z.size(); i += 2) {
    Real a = z[i], b = z[i + 1];
    z[i] = e[i] * a - e[i + 1] * b;
    z[i + 1] = e[i] * b + e[i + 1] * a;
  }
}

}  // namespace

template <class Real>
template <class S>
CompiledField<Real>::CompiledField(const VectorField<S>& X) {
  const auto& ctx = X.context();
  const std::size_t n = ctx.dimension();
  lin_re_.assign(n, Real(0));
  lin_im_.assign(n, Real(0));
  max_exp_.assign(n, 0);
  for (const auto& [key, c] : X.terms()) {
    auto [re, im] = coefficient_to<Real>(c);
    int k = ctx.index_of(key.k);
    if (key.q.total() == 1 && key.q[key.k] == 1) {
      lin_re_[static_cast<std::size_t>(k)] += re;
      lin_im_[static_cast<std::size_t>(k)] += im;
      continue;
    }
    Term t{k, re, im, {}};
    for (const auto& [mode, e] : key.q.entries()) {
      int i = ctx.index_of(mode);
      t.factors.emplace_back(i, e);
      max_exp_[static_cast<std::size_t>(i)] = std::max(max_exp_[static_cast<std::size_t>(i)], e);
    }
    terms_.push_back(std::move(t));
  }
  std::size_t off = 0;
  pow_offset_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pow_offset_[i] = off;
    off += 2 * static_cast<std::size_t>(max_exp_[i] + 1);
  }
  pow_.assign(off, Real(0));
}

template <class Real>
void CompiledField<Real>::nonlinear(const std::vector<Real>& z, std::vector<Real>& out) const {
  const std::size_t n = dim();
  out.assign(2 * n, Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    Real* p = pow_.data() + pow_offset_[i];
    p[0] = 1;
    p[1] = 0;
    const Real& a = z[2 * i];
    const Real& b = z[2 * i + 1];
    for (int e = 1; e <= max_exp_[i]; ++e) {
      p[2 * e] = p[2 * e - 2] * a - p[2 * e - 1] * b;
      p[2 * e + 1] = p[2 * e - 2] * b + p[2 * e - 1] * a;
    }
  }
  for (const auto& t : terms_) {
    Real re = t.re, im = t.im;
    for (const auto& [i, e] : t.factors) {
      const Real* p = pow_.data() + pow_offset_[static_cast<std::size_t>(i)] + 2 * e;
      Real nr = re * p[0] - im * p[1];
      im = re * p[1] + im * p[0];
      re = nr;
    }
    out[2 * static_cast<std::size_t>(t.k)] += re;
    out[2 * static_cast<std::size_t>(t.k) + 1] += im;
  }
}

template <class Real>
void CompiledField<Real>::full(const std::vector<Real>& z, std::vector<Real>& out) const {
  nonlinear(z, out);
  for (std::size_t i = 0; i < dim(); ++i) {
    out[2 * i] += lin_re_[i] * z[2 * i] - lin_im_[i] * z[2 * i + 1];
    out[2 * i + 1] += lin_re_[i] * z[2 * i + 1] + lin_im_[i] * z[2 * i];
  }
}

template <class Real>
RealFlowResult<Real> integrate_real(const CompiledField<Real>& f, std::vector<Real> z, Real t,
                                    int steps, bool lawson, double blowup,
                                    std::vector<std::pair<double, std::vector<Real>>>* samples,
                                    int record_every) {
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  RealFlowResult<Real> res;
  const std::size_t m = z.size();
  const Real h = t / steps;
  std::vector<Real> k1(m), k2(m), k3(m), k4(m), tmp(m);
  std::vector<Real> E(m), E2(m);
  if (lawson) {
    for (std::size_t i = 0; i < m / 2; ++i) {
      auto [a, b] = cexp<Real>(f.linear_re()[i] * h / 2, f.linear_im()[i] * h / 2);
      E[2 * i] = a;
      E[2 * i + 1] = b;
      auto [c, d] = cexp<Real>(f.linear_re()[i] * h, f.linear_im()[i] * h);
      E2[2 * i] = c;
      E2[2 * i + 1] = d;
    }
  }
  if (samples) samples->emplace_back(0.0, z);
  for (int s = 0; s < steps; ++s) {
    if (lawson) {
      f.nonlinear(z, k1);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = z[i] + h / 2 * k1[i];
      cmul_inplace(E, tmp);
      f.nonlinear(tmp, k2);
      std::vector<Real> Ez = z;
      cmul_inplace(E, Ez);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = Ez[i] + h / 2 * k2[i];
      f.nonlinear(tmp, k3);
      std::vector<Real> E2z = z;
      cmul_inplace(E2, E2z);
      std::vector<Real> Ek3 = k3;
      cmul_inplace(E, Ek3);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = E2z[i] + h * Ek3[i];
      f.nonlinear(tmp, k4);
      cmul_inplace(E2, k1);
      for (std::size_t i = 0; i < m; ++i) k2[i] += k3[i];
      cmul_inplace(E, k2);
      for (std::size_t i = 0; i < m; ++i) z[i] = E2z[i] + h / 6 * (k1[i] + 2 * k2[i] + k4[i]);
    } else {
      f.full(z, k1);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = z[i] + h / 2 * k1[i];
      f.full(tmp, k2);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = z[i] + h / 2 * k2[i];
      f.full(tmp, k3);
      for (std::size_t i = 0; i < m; ++i) tmp[i] = z[i] + h * k3[i];
      f.full(tmp, k4);
      for (std::size_t i = 0; i < m; ++i) z[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    if (!finite_and_bounded(z, blowup)) {
      res.diverged = true;
      break;
    }
    if (samples && record_every > 0 && (s + 1) % record_every == 0)
      samples->emplace_back(static_cast<double>(h * (s + 1)), z);
  }
  if (samples && (record_every <= 0 || steps % record_every != 0) && !res.diverged)
    samples->emplace_back(static_cast<double>(t), z);
  res.state = std::move(z);
  return res;
}

std::vector<double> to_real_state(const std::vector<Complex>& x) {
  std::vector<double> z(2 * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[2 * i] = x[i].real();
    z[2 * i + 1] = x[i].imag();
  }
  return z;
}

std::vector<Complex> from_real_state(const std::vector<double>& z) {
  std::vector<Complex> x(z.size() / 2);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = {z[2 * i], z[2 * i + 1]};
  return x;
}

std::vector<Complex> linear_flow(const FrequencyModel& model, const TruncationContext& ctx,
                                 const std::vector<Complex>& xi, double t) {
  auto modes = ctx.modes();
  if (xi.size() != modes.size()) throw InputError("point has the wrong dimension");
  std::vector<Complex> out(xi.size());
  for (std::size_t i = 0; i < modes.size(); ++i)
    out[i] = xi[i] * std::exp(model.numeric(model.lambda(modes[i])) * t);
  return out;
}

template <class S>
Trajectory integrate_flow(const VectorField<S>& W, const std::vector<Complex>& x0, double t,
                          const FlowConfig& config) {
  if (x0.size() != W.context().dimension()) throw InputError("point has the wrong dimension");
  CompiledField<double> f(W);
  Trajectory tr;
  std::vector<std::pair<double, std::vector<double>>> samples;
  auto coarse = integrate_real<double>(f, to_real_state(x0), t, config.steps, config.lawson,
                                       config.blowup, &samples, config.record_every);
  tr.diverged = coarse.diverged;
  for (auto& [time, z] : samples) tr.samples.emplace_back(time, from_real_state(z));
  tr.final_state = from_real_state(coarse.state);
  if (!tr.diverged) {
    auto fine = integrate_real<double>(f, to_real_state(x0), t, 2 * config.steps, config.lawson,
                                       config.blowup);
    double e = 0.0;
    for (std::size_t i = 0; i < fine.state.size(); ++i) {
      double d = fine.state[i] - coarse.state[i];
      e += d * d;
    }
    tr.error_estimate = std::sqrt(e);
  }
  return tr;
}

template <class Real, class S>
std::vector<Real> apply_transform_real(const TransformLog<S>& log, std::vector<Real> x,
                                       Direction direction, int steps) {
  const std::size_t n = log.size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t i = direction == Direction::forward ? n - 1 - idx : idx;
    CompiledField<Real> f(log.F[i]);
    Real t = direction == Direction::forward ? Real(1) : Real(-1);
    auto res = integrate_real<Real>(f, std::move(x), t, steps, false, 1e6);
    if (res.diverged) throw IntegratorDivergence("generator flow diverged");
    x = std::move(res.state);
  }
  return x;
}

template <class S>
std::vector<Complex> apply_transform(const TransformLog<S>& log, const std::vector<Complex>& x,
                                     Direction direction, int steps) {
  return from_real_state(apply_transform_real<double>(log, to_real_state(x), direction, steps));
}

template <class S>
double conjugacy_error(const VectorField<S>& W0, const TransformLog<S>& log,
                       const std::vector<Complex>& xi, double t, const FlowConfig& config) {
  const std::size_t n = W0.context().dimension();
  if (xi.size() != n) throw InputError("point has the wrong dimension");
  CompiledField<quad> f(W0);
  std::vector<quad> z(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    z[2 * i] = xi[i].real();
    z[2 * i + 1] = xi[i].imag();
  }
  std::vector<quad> start = apply_transform_real<quad>(log, z, Direction::forward, config.transform_steps);
  auto flow = integrate_real<quad>(f, start, quad(t), config.steps, config.lawson, config.blowup);
  if (flow.diverged) throw IntegratorDivergence("trajectory left the blow-up ball");
  std::vector<quad> lin(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [a, b] = cexp<quad>(f.linear_re()[i] * t, f.linear_im()[i] * t);
    lin[2 * i] = a * z[2 * i] - b * z[2 * i + 1];
    lin[2 * i + 1] = a * z[2 * i + 1] + b * z[2 * i];
  }
  std::vector<quad> image = apply_transform_real<quad>(log, lin, Direction::forward, config.transform_steps);
  quad e = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    quad d = flow.state[i] - image[i];
    e += d * d;
  }
  return static_cast<double>(sqrt(e));
}

template class CompiledField<double>;
template class CompiledField<quad>;
template CompiledField<double>::CompiledField(const VectorField<GaussianRational>&);
template CompiledField<double>::CompiledField(const VectorField<Complex>&);
template CompiledField<quad>::CompiledField(const VectorField<GaussianRational>&);
template CompiledField<quad>::CompiledField(const VectorField<Complex>&);
template RealFlowResult<double> integrate_real(const CompiledField<double>&, std::vector<double>, double, int,
                                               bool, double, std::vector<std::pair<double, std::vector<double>>>*, int);
template RealFlowResult<quad> integrate_real(const CompiledField<quad>&, std::vector<quad>, quad, int, bool,
                                             double, std::vector<std::pair<double, std::vector<quad>>>*, int);

#define RNF_FLOW(S)                                                                                \
  template Trajectory integrate_flow(const VectorField<S>&, const std::vector<Complex>&, double,   \
                                     const FlowConfig&);                                           \
  template std::vector<Complex> apply_transform(const TransformLog<S>&, const std::vector<Complex>&, \
                                                Direction, int);                                   \
  template std::vector<double> apply_transform_real(const TransformLog<S>&, std::vector<double>,   \
                                                    Direction, int);                               \
  template std::vector<quad> apply_transform_real(const TransformLog<S>&, std::vector<quad>,       \
                                                  Direction, int);                                 \
  template double conjugacy_error(const VectorField<S>&, const TransformLog<S>&,                   \
                                  const std::vector<Complex>&, double, const FlowConfig&);

RNF_FLOW(GaussianRational)
RNF_FLOW(Complex)

}  // namespace rnf
