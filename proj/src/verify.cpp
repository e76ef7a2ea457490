#include "rnf/verify.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "rnf/errors.hpp"
#include "rnf/textio.hpp"

namespace rnf {

namespace {

template <class S>
S from_exact(const GaussianRational& g) {
  return ScalarTraits<S>::from_pair(g, g.to_complex());
}

GaussianRational random_coefficient(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mag(1, 3), den(1, 4), sign(0, 1), im(-3, 3);
  int num = mag(rng) * (sign(rng) ? 1 : -1);
  int d = den(rng);
  int ni = im(rng);
  int di = den(rng);
  return {Rational(num, d), Rational(ni, di)};
}

mpz_class factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

mpz_class multinomial(const std::vector<int>& parts) {
  int total = 0;
  mpz_class den = 1;
  for (int p : parts) {
    total += p;
    den *= factorial(p);
  }
  return factorial(total) / den;
}

// All compositions of `total` into `n` nonnegative parts.
void compositions(int n, int total, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == n - 1) {
      parts[static_cast<std::size_t>(pos)] = rem;
      f(parts);
      return;
    }
    for (int e = 0; e <= rem; ++e) {
      parts[static_cast<std::size_t>(pos)] = e;
      rec(pos + 1, rem - e);
    }
  };
  if (n > 0) rec(0, total);
}

// Symbols omega_j = j^2 + V_j, one per distinct value.
std::map<int, std::size_t> lattice_symbols(FrequencyModel& m, const std::map<int, Rational>& V, int cutoff) {
  std::map<int, std::size_t> sym;
  std::map<Rational, std::size_t> by_value;
  for (int a = 0; a <= cutoff; ++a)
    for (int j : {a, -a}) {
      if (sym.count(j)) continue;
      auto it = V.find(j);
      Rational w = Rational(j * j) + (it == V.end() ? Rational(0) : it->second);
      auto found = by_value.find(w);
      if (found == by_value.end()) {
        std::size_t s = m.add_symbol("w" + std::to_string(j), w, w.get_d());
        found = by_value.emplace(w, s).first;
      }
      sym[j] = found->second;
    }
  return sym;
}

}  // namespace

SigmaSpec SigmaSpec::from_module(const ResonanceModule& module) {
  SigmaSpec s;
  s.generators = module.Q;
  for (const auto& q : module.Q) {
    bool covered = false;
    for (ModeKey z : s.zeroed)
      if (q[z] > 0) covered = true;
    if (!covered) s.zeroed.push_back(q.entries().back().first);
  }
  return s;
}

bool SigmaSpec::contains(const std::vector<Complex>& x, const TruncationContext& ctx, double tol) const {
  for (const auto& q : generators) {
    Complex v = 1.0;
    for (const auto& [k, e] : q.entries()) v *= std::pow(x.at(static_cast<std::size_t>(ctx.index_of(k))), e);
    if (std::abs(v) > tol) return false;
  }
  return true;
}

std::vector<Complex> SigmaSpec::project(std::vector<Complex> x, const TruncationContext& ctx) const {
  for (ModeKey k : zeroed) x.at(static_cast<std::size_t>(ctx.index_of(k))) = 0.0;
  return x;
}

template <class S>
TangencyReport check_tangent_sigma(const VectorField<S>& W, const FrequencyModel& model,
                                   const ResonanceModule& module, int m_star) {
  const auto& ctx = W.context();
  const int M = m_star > 0 ? m_star : module.M_star_minimal;
  TangencyReport rep;
  for (const auto& [key, c] : W.terms()) {
    const int deg = scaling_degree(key);
    bool ok;
    if (deg == 0)
      ok = key.q == MultiIndex::unit(key.k);
    else if (deg < M && key.q[key.k] > 0 && is_resonant(model, ctx, key.q, key.k))
      ok = true;
    else
      ok = module.classify(key.q) == Ideal::J2;
    if (!ok) {
      rep.tangent = false;
      rep.offending.push_back(format_term(key.k, key.q, c, ctx));
    }
  }
  return rep;
}

double loglog_slope(const std::vector<double>& rho, const std::vector<double>& err) {
  if (rho.size() != err.size() || rho.size() < 2) throw std::invalid_argument("need at least two points");
  double n = static_cast<double>(rho.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double x = std::log(rho[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <class S>
ScalingReport conjugacy_scaling(const VectorField<S>& W0, const TransformLog<S>& log,
                                const SigmaSpec& sigma, const std::vector<double>& rhos, double t,
                                const FlowConfig& config, std::uint64_t seed, int directions) {
  const auto& ctx = W0.context();
  const std::size_t n = ctx.dimension();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto unit = [&](bool on) {
    std::vector<Complex> u(n);
    for (auto& v : u) v = {g(rng), g(rng)};
    if (on) u = sigma.project(std::move(u), ctx);
    double norm = 0;
    for (auto& v : u) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (auto& v : u) v /= norm;
    return u;
  };
  std::vector<std::vector<Complex>> on_dirs, off_dirs;
  for (int d = 0; d < directions; ++d) {
    on_dirs.push_back(unit(true));
    off_dirs.push_back(unit(false));
  }
  ScalingReport rep;
  std::vector<double> on_err, off_err;
  for (double rho : rhos) {
    ScalingRow row;
    row.rho = rho;
    for (int d = 0; d < directions; ++d) {
      auto scaled = [&](const std::vector<Complex>& u) {
        std::vector<Complex> x(u);
        for (auto& v : x) v *= rho;
        return x;
      };
      row.on_sigma += conjugacy_error(W0, log, scaled(on_dirs[static_cast<std::size_t>(d)]), t, config);
      row.off_sigma += conjugacy_error(W0, log, scaled(off_dirs[static_cast<std::size_t>(d)]), t, config);
    }
    rep.rows.push_back(row);
    on_err.push_back(row.on_sigma);
    off_err.push_back(row.off_sigma);
  }
  if (rhos.size() >= 2) {
    std::vector<double> r(rhos);
    bool on_ok = std::all_of(on_err.begin(), on_err.end(), [](double e) { return e > 0; });
    bool off_ok = std::all_of(off_err.begin(), off_err.end(), [](double e) { return e > 0; });
    rep.slope_on = on_ok ? loglog_slope(r, on_err) : NAN;
    rep.slope_off = off_ok ? loglog_slope(r, off_err) : NAN;
  }
  return rep;
}

std::map<int, Rational> default_potential(int cutoff) {
  std::map<int, Rational> V;
  for (int j = -cutoff; j <= cutoff; ++j) {
    Rational v = Rational(1, j * j + 3) + Rational(j * j * j, 1009);
    v.canonicalize();
    V[j] = v;
  }
  return V;
}

template <class S>
Example<S> build_example_dim6(double zeta1, double zeta2, std::uint64_t seed, int degree_cutoff) {
  auto ctx = TruncationContext::finite(6, degree_cutoff);
  FrequencyModel m;
  m.add_symbol("1", Rational(1), 1.0);
  m.add_symbol("zeta1", zeta1);
  m.add_symbol("zeta2", zeta2);
  const long coef[6][2] = {{0, 2}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {2, -1}};
  for (int i = 0; i < 6; ++i)
    m.set_lambda(ModeKey::finite(i + 1),
                 SymbolicValue::basis(3, static_cast<std::size_t>(coef[i][0]), GaussianRational(coef[i][1])));
  m.alpha = 2.0;
  for (ModeKey k : ctx.modes()) m.phases[k] = std::arg(m.numeric(m.lambda(k)));
  Example<S> ex{ctx, m, linear_field<S>(m, ctx)};
  if (seed == 0) return ex;

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution pick(1.0 / 3.0);
  for (int pair : {3, 5})
    for (int k = 1; k <= 6; ++k) {
      if (!pick(rng)) continue;
      MultiIndex q{{ModeKey::finite(pair), 1}, {ModeKey::finite(pair + 1), 1}};
      q.add(ModeKey::finite(k), 1);
      ex.W.add_term(ModeKey::finite(k), q, from_exact<S>(random_coefficient(rng)));
    }
  const int top = std::min(6, degree_cutoff);
  if (top >= 4) {
    std::uniform_int_distribution<int> deg(4, top), var(1, 6);
    for (int t = 0; t < 6; ++t) {
      int d = deg(rng);
      MultiIndex q;
      for (int u = 0; u < d + 1; ++u) q.add(ModeKey::finite(var(rng)), 1);
      ModeKey k = ModeKey::finite(var(rng));
      ex.W.add_term(k, q, from_exact<S>(random_coefficient(rng)));
    }
  }
  return ex;
}

template <class S>
Example<S> build_example_dim4(double zeta, int degree_cutoff) {
  auto ctx = TruncationContext::finite(4, degree_cutoff);
  FrequencyModel m;
  m.add_symbol("1", Rational(1), 1.0);
  m.add_symbol("zeta", zeta);
  const long coef[4][2] = {{0, 2}, {0, 1}, {1, 1}, {1, -1}};
  for (int i = 0; i < 4; ++i)
    m.set_lambda(ModeKey::finite(i + 1),
                 SymbolicValue::basis(2, static_cast<std::size_t>(coef[i][0]), GaussianRational(coef[i][1])));
  for (ModeKey k : ctx.modes()) m.phases[k] = std::arg(m.numeric(m.lambda(k)));
  return Example<S>{ctx, m, linear_field<S>(m, ctx)};
}

template <class S>
Example<S> build_example_nls(int p, const std::map<int, Rational>& V, int cutoff, int degree_cutoff) {
  if (p < 1) throw InputError("nls power must be at least 1");
  auto ctx = TruncationContext::lattice(cutoff, degree_cutoff, true);
  FrequencyModel m;
  auto sym = lattice_symbols(m, V, cutoff);
  const std::size_t ns = m.symbols().size();
  for (ModeKey k : ctx.modes()) {
    m.set_lambda(k, SymbolicValue::basis(ns, sym.at(k.j), GaussianRational(Rational(0), Rational(k.sigma))));
    m.phases[k] = k.sigma * M_PI / 2;
  }
  m.alpha = 2.0;
  m.phase_separation_C = 2.0;
  Example<S> ex{ctx, m, linear_field<S>(m, ctx)};

  const int nj = 2 * cutoff + 1;
  for (ModeKey k : ctx.modes()) {
    const int s = k.sigma;
    compositions(nj, p + 1, [&](const std::vector<int>& a) {
      int mom_a = 0;
      for (int i = 0; i < nj; ++i) mom_a += s * (i - cutoff) * a[static_cast<std::size_t>(i)];
      compositions(nj, p, [&](const std::vector<int>& b) {
        int mom = mom_a;
        for (int i = 0; i < nj; ++i) mom -= s * (i - cutoff) * b[static_cast<std::size_t>(i)];
        if (mom != s * k.j) return;
        MultiIndex q;
        for (int i = 0; i < nj; ++i) {
          if (a[static_cast<std::size_t>(i)]) q.add(ModeKey{i - cutoff, s}, a[static_cast<std::size_t>(i)]);
          if (b[static_cast<std::size_t>(i)]) q.add(ModeKey{i - cutoff, -s}, b[static_cast<std::size_t>(i)]);
        }
        Rational c(multinomial(a) * multinomial(b));
        ex.W.add_term(k, q, from_exact<S>(GaussianRational(Rational(0), Rational(s) * c)));
      });
    });
  }
  return ex;
}

template <class S>
Example<S> build_example_hyperbolic(const std::map<int, Rational>& V, int cutoff, int degree_cutoff,
                                    std::uint64_t seed, const std::set<int>& elliptic) {
  auto ctx = TruncationContext::lattice(cutoff, degree_cutoff, true);
  FrequencyModel m;
  auto sym = lattice_symbols(m, V, cutoff);
  const std::size_t ns = m.symbols().size();
  for (ModeKey k : ctx.modes()) {
    bool ell = elliptic.count(k.j) > 0;
    GaussianRational c = ell ? GaussianRational(Rational(0), Rational(k.sigma)) : GaussianRational(k.sigma);
    m.set_lambda(k, SymbolicValue::basis(ns, sym.at(k.j), c));
    m.phases[k] = ell ? k.sigma * M_PI / 2 : (k.sigma > 0 ? 0.0 : M_PI);
  }
  m.alpha = 2.0;
  Example<S> ex{ctx, m, linear_field<S>(m, ctx)};
  if (seed == 0) return ex;

  std::mt19937_64 rng(seed);
  auto modes = ctx.modes();
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  const int top = std::min(4, degree_cutoff + 1);
  if (top < 3) return ex;
  std::uniform_int_distribution<int> deg(3, top);
  int made = 0;
  for (int attempt = 0; attempt < 10000 && made < 5; ++attempt) {
    MultiIndex q;
    int d = deg(rng);
    for (int u = 0; u < d; ++u) q.add(modes[pick(rng)], 1);
    if (momentum(q, ctx) != 0) continue;
    ++made;
    GaussianRational c(random_coefficient(rng).re);
    for (const auto& [mode, e] : q.entries()) {
      ModeKey dir{mode.j, -mode.sigma};
      GaussianRational cj = elliptic.count(dir.j) ? GaussianRational::i() : GaussianRational(1);
      MultiIndex r = q;
      r.add(mode, -1);
      ex.W.add_term(dir, r, from_exact<S>(GaussianRational(dir.sigma * e) * cj * c));
    }
  }
  return ex;
}

#define RNF_VERIFY(S)                                                                              \
  template TangencyReport check_tangent_sigma(const VectorField<S>&, const FrequencyModel&,        \
                                              const ResonanceModule&, int);                        \
  template ScalingReport conjugacy_scaling(const VectorField<S>&, const TransformLog<S>&,          \
                                           const SigmaSpec&, const std::vector<double>&, double,   \
                                           const FlowConfig&, std::uint64_t, int);                 \
  template Example<S> build_example_dim6(double, double, std::uint64_t, int);                      \
  template Example<S> build_example_dim4(double, int);                                             \
  template Example<S> build_example_nls(int, const std::map<int, Rational>&, int, int);            \
  template Example<S> build_example_hyperbolic(const std::map<int, Rational>&, int, int,           \
                                               std::uint64_t, const std::set<int>&);

RNF_VERIFY(GaussianRational)
RNF_VERIFY(Complex)

}  // namespace rnf
