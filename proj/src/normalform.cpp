#include "rnf/normalform.hpp"

#include <cmath>
#include <stdexcept>

#include "rnf/errors.hpp"
#include "rnf/textio.hpp"

namespace rnf {

namespace {

template <class S>
std::string term_text(const TermKey& key, const S& c, const TruncationContext& ctx) {
  return format_term(key.k, key.q, c, ctx);
}

template <class S>
VectorField<S> project_ideal(const VectorField<S>& X, const ResonanceModule& module, Ideal which) {
  return project_set(X, [&](const MultiIndex& q, ModeKey) { return module.classify(q) == which; });
}

template <class S>
void require_diagonal_resonant(const VectorField<S>& Z, const FrequencyModel& model) {
  const auto& ctx = Z.context();
  for (const auto& [key, c] : Z.terms())
    if (key.q[key.k] == 0 || !is_resonant(model, ctx, key.q, key.k))
      throw HypothesisViolation("Z must be diagonal and resonant", term_text(key, c, ctx));
}

struct Schedule {
  double r, s, rho, sigma;
};

Schedule schedule(const KamParams& p, int n) {
  const double rho = p.r_prime;
  const double sigma = p.s_prime - p.s_base;
  auto sigma_n = [&](int m) {
    return m == 0 ? sigma / 8.0 : 9.0 * sigma / (4.0 * M_PI * M_PI * m * m);
  };
  double r = 2.0 * p.r_prime, s = p.s_base;
  for (int m = 0; m < n; ++m) {
    r -= 5.0 * rho / 10.0 * std::ldexp(1.0, -m);
    s += 2.0 * sigma_n(m);
  }
  return {r, s, rho / 10.0 * std::ldexp(1.0, -n), sigma_n(n)};
}

}  // namespace

template <class S>
VectorField<S> DecomposedField<S>::assemble() const {
  VectorField<S> W = linear;
  W += Z;
  W += X;
  W += N;
  return W;
}

int kam_step_limit(int degree_cutoff, int m_star) {
  int n = 0;
  while (static_cast<long>(m_star) << n < degree_cutoff + 1) ++n;
  return n + 1;
}

template <class S>
DecomposedField<S> decompose(const VectorField<S>& W, const FrequencyModel& model,
                             const ResonanceModule& module, int m_star) {
  const auto& ctx = W.context();
  const int M = m_star > 0 ? m_star : module.M_star_minimal;
  DecomposedField<S> d{VectorField<S>(ctx), VectorField<S>(ctx), VectorField<S>(ctx),
                       VectorField<S>(ctx), M};
  for (const auto& [key, c] : W.terms()) {
    const int deg = scaling_degree(key);
    if (deg == 0) {
      if (!(key.q == MultiIndex::unit(key.k)))
        throw HypothesisViolation("non-diagonal linear term", term_text(key, c, ctx));
      S lam = model.value<S>(model.lambda(key.k));
      double tol = 1e-9 * std::max(1.0, ScalarTraits<S>::abs(lam));
      if (!ScalarTraits<S>::approx_equal(c, lam, tol))
        throw HypothesisViolation("linear part differs from D(lambda)", term_text(key, c, ctx));
      d.linear.add_term(key.k, key.q, c);
    } else if (deg < M) {
      if (!is_resonant(model, ctx, key.q, key.k))
        throw HypothesisViolation("non-resonant term below degree M*; prenormalize first",
                                  term_text(key, c, ctx));
      if (key.q[key.k] == 0)
        throw HypothesisViolation("non-diagonal resonant term below degree M*", term_text(key, c, ctx));
      d.Z.add_term(key.k, key.q, c);
    } else if (module.classify(key.q) == Ideal::J2) {
      d.N.add_term(key.k, key.q, c);
    } else {
      d.X.add_term(key.k, key.q, c);
    }
  }
  for (ModeKey k : ctx.modes())
    if (ScalarTraits<S>::is_zero(d.linear.coefficient(k, MultiIndex::unit(k)), 0.0))
      throw HypothesisViolation("missing linear term", format_mode(k, ctx));
  return d;
}

template <class S>
VectorField<S> solve_linear_homological(const VectorField<S>& Y, const FrequencyModel& model) {
  const auto& ctx = Y.context();
  VectorField<S> F(ctx);
  for (const auto& [key, c] : Y.terms()) {
    SymbolicValue div = model.divisor(key.q, key.k);
    if (div.is_zero()) throw ResonantTermInRange("resonant term " + term_text(key, c, ctx));
    F.add_term(key.k, key.q, c / model.value<S>(div));
  }
  return F;
}

template <class S>
std::pair<VectorField<S>, TransformLog<S>> prenormalize(const VectorField<S>& W,
                                                        const FrequencyModel& model,
                                                        const ResonanceModule& module, int m_star) {
  const auto& ctx = W.context();
  const int M = m_star > 0 ? m_star : module.M_star_minimal;
  VectorField<S> cur = W;
  TransformLog<S> log;
  for (int d = 1; d < M && d <= ctx.degree_cutoff; ++d) {
    VectorField<S> R = project_set(cur, [&](const MultiIndex& q, ModeKey k) {
      return q.total() - 1 == d && !is_resonant(model, ctx, q, k);
    });
    if (R.is_zero()) continue;
    VectorField<S> F = solve_linear_homological(R, model);
    cur = pushforward_exp(F, cur);
    log.push(std::move(F), Generator{"prenormal", d});
  }
  return {std::move(cur), std::move(log)};
}

template <class S>
VectorField<S> solve_extended_homological(const VectorField<S>& Xi, int i, const VectorField<S>& Z,
                                          const VectorField<S>& N, const VectorField<S>* F0,
                                          const FrequencyModel& model,
                                          const ResonanceModule& module) {
  if (i != 0 && i != 1) throw std::invalid_argument("ideal index must be 0 or 1");
  const Ideal which = i == 0 ? Ideal::J0 : Ideal::J1;
  require_diagonal_resonant(Z, model);
  for (const auto& [key, c] : Xi.terms())
    if (module.classify(key.q) != which)
      throw std::invalid_argument("right-hand side is not in the requested ideal");

  VectorField<S> Y = Xi;
  if (i == 1) {
    if (!F0) throw std::invalid_argument("the I1 equation needs F0");
    VectorField<S> ZN = Z;
    ZN += N;
    Y += project_ideal(bracket(*F0, ZN), module, which);
  }
  // (A + B)^{-1} with A = L_lambda and B = Pi[Z, .]; the Neumann series terminates
  // because B raises the degree.
  VectorField<S> U = solve_linear_homological(Y, model);
  VectorField<S> F = U;
  for (int guard = 0; !U.is_zero(); ++guard) {
    if (guard > Xi.context().degree_cutoff + 1) throw std::logic_error("homological series did not terminate");
    U = -solve_linear_homological(project_ideal(bracket(Z, U), module, which), model);
    F += U;
  }
  return F;
}

template <class S>
VectorField<S> pushforward_exp(const VectorField<S>& F, const VectorField<S>& W) {
  if (F.is_zero()) return W;
  const int ord = F.order();
  if (ord < 1) throw NonterminatingSeries("generator of order 0");
  const int D = W.context().degree_cutoff;
  const int limit = (D + 1 + ord - 1) / ord;
  VectorField<S> out = W;
  VectorField<S> term = W;
  int nonzero = W.is_zero() ? 0 : 1;
  for (long k = 1; !term.is_zero(); ++k) {
    term = bracket(F, term);
    term *= ScalarTraits<S>::from_rational(Rational(1, k));
    if (term.is_zero()) break;
    if (++nonzero > limit) throw std::logic_error("Lie series longer than the degree count allows");
    out += term;
  }
  if (term.truncated()) out.mark_truncated();
  return out;
}

template <class S>
StepResult<S> kam_step(const DecomposedField<S>& d, const FrequencyModel& model,
                       const ResonanceModule& module, const KamParams& params, int step) {
  if (d.X.is_zero()) throw AlreadyNormal("X is zero");
  auto parts = split_ideals(d.X, module);
  if (!parts.X2.is_zero()) throw std::invalid_argument("X has an I2 component");

  VectorField<S> F0 = solve_extended_homological(parts.X0, 0, d.Z, d.N, static_cast<const VectorField<S>*>(nullptr), model, module);
  VectorField<S> F1 = solve_extended_homological(parts.X1, 1, d.Z, d.N, &F0, model, module);
  VectorField<S> F = F0;
  F += F1;

  VectorField<S> Wp = pushforward_exp(F, d.assemble());
  DecomposedField<S> next = decompose(Wp, model, module, d.m_star);
  if (!(next.Z == d.Z)) throw std::logic_error("KAM step changed Z");

  StepRecord rec;
  rec.step = step;
  rec.ord_X = d.X.order();
  rec.ord_X_next = next.X.order();
  rec.doubled = next.X.is_zero() || rec.ord_X_next >= 2 * rec.ord_X;
  rec.generator_terms = F.size();
  Schedule sc = schedule(params, step);
  rec.r = sc.r;
  rec.s = sc.s;
  rec.rho = sc.rho;
  rec.sigma = sc.sigma;
  rec.norm_X = majorant_norm(d.X, sc.r, sc.s, params.norm_samples).upper;
  rec.norm_Z = majorant_norm(d.Z, sc.r, sc.s, params.norm_samples).upper;
  rec.norm_N = majorant_norm(d.N, sc.r, sc.s, params.norm_samples).upper;
  rec.eps = rec.norm_X / params.gamma;
  rec.Theta = (rec.norm_Z + rec.norm_N) / params.gamma + rec.eps;
  rec.smallness_lhs = std::pow(1.0 + (rec.norm_Z + rec.norm_N) / params.gamma, 3) * rec.eps;
  rec.smallness_rhs = params.K1 * std::pow(sc.rho / sc.r, 4) *
                      std::exp(-256.0 * params.c / std::pow(sc.sigma, 6));
  rec.smallness_ok = rec.smallness_lhs <= rec.smallness_rhs;
  return StepResult<S>{std::move(next), std::move(F), rec};
}

template <class S>
NormalFormResult<S> normalize(const VectorField<S>& W, const FrequencyModel& model,
                              const ResonanceModule& module, const KamParams& params,
                              bool run_prenormalize, int m_star) {
  const int M = m_star > 0 ? m_star : module.M_star_minimal;
  TransformLog<S> log;
  VectorField<S> start = W;
  if (run_prenormalize) {
    auto [pre, plog] = prenormalize(W, model, module, M);
    start = std::move(pre);
    log = std::move(plog);
  }
  KamTrace trace;
  trace.prenormal_steps = static_cast<int>(log.size());
  DecomposedField<S> d = decompose(start, model, module, M);
  const int limit = kam_step_limit(W.context().degree_cutoff, M);
  for (int step = 0; !d.X.is_zero(); ++step) {
    if (step >= limit) throw std::logic_error("KAM iteration exceeded the order-doubling step bound");
    auto res = kam_step(d, model, module, params, step);
    if (step == 0) trace.initial_gianna = res.record.eps * std::pow(1.0 + res.record.Theta, 7);
    trace.steps.push_back(res.record);
    log.push(std::move(res.F), Generator{"kam", step});
    d = std::move(res.next);
  }
  return NormalFormResult<S>{std::move(d), std::move(log), std::move(trace)};
}

#define RNF_NORMALFORM(S)                                                                          \
  template struct DecomposedField<S>;                                                              \
  template DecomposedField<S> decompose(const VectorField<S>&, const FrequencyModel&,              \
                                        const ResonanceModule&, int);                              \
  template VectorField<S> solve_linear_homological(const VectorField<S>&, const FrequencyModel&);  \
  template std::pair<VectorField<S>, TransformLog<S>> prenormalize(                                \
      const VectorField<S>&, const FrequencyModel&, const ResonanceModule&, int);                  \
  template VectorField<S> solve_extended_homological(                                              \
      const VectorField<S>&, int, const VectorField<S>&, const VectorField<S>&,                    \
      const VectorField<S>*, const FrequencyModel&, const ResonanceModule&);                       \
  template VectorField<S> pushforward_exp(const VectorField<S>&, const VectorField<S>&);           \
  template StepResult<S> kam_step(const DecomposedField<S>&, const FrequencyModel&,                \
                                  const ResonanceModule&, const KamParams&, int);                  \
  template NormalFormResult<S> normalize(const VectorField<S>&, const FrequencyModel&,             \
                                         const ResonanceModule&, const KamParams&, bool, int);

RNF_NORMALFORM(GaussianRational)
RNF_NORMALFORM(Complex)

}  // namespace rnf
