#include "rnf/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "rnf/errors.hpp"
#include "rnf/textio.hpp"

namespace rnf {

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto v : k) h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

// Frequencies scaled to integer vectors over the symbol basis, real and
// imaginary parts interleaved, with the momentum appended as a last entry.
struct IntegerFrequencies {
  std::vector<ModeKey> modes;
  std::vector<Key> v;
  std::size_t width = 0;
  Rational scale;
  std::vector<double> symbol_values;

  IntegerFrequencies(const TruncationContext& ctx, const FrequencyModel& model, int max_degree) {
    modes = ctx.modes();
    std::size_t ns = model.symbols().size();
    width = 2 * ns + 1;
    mpz_class L = 1;
    for (ModeKey k : modes)
      for (const auto& c : model.lambda(k).coords()) {
        mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.re.get_den_mpz_t());
        mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.im.get_den_mpz_t());
      }
    scale = Rational(L);
    const double limit = std::ldexp(1.0, 60) / std::max(1, max_degree + 1);
    for (ModeKey k : modes) {
      Key row(width, 0);
      const auto& coords = model.lambda(k).coords();
      for (std::size_t s = 0; s < coords.size(); ++s) {
        Rational re = coords[s].re * scale, im = coords[s].im * scale;
        if (std::abs(re.get_d()) > limit || std::abs(im.get_d()) > limit)
          throw InputError("frequency coordinates too large for exact enumeration");
        row[2 * s] = re.get_num().get_si();
        row[2 * s + 1] = im.get_num().get_si();
      }
      row[2 * ns] = ctx.momentum_enabled ? ctx.momentum(k) : 0;
      v.push_back(std::move(row));
    }
    for (const auto& s : model.symbols()) symbol_values.push_back(s.value);
  }

  static bool zero(const Key& k) {
    return std::all_of(k.begin(), k.end(), [](std::int64_t x) { return x == 0; });
  }

  static bool momentum_zero(const Key& k) { return k.back() == 0; }

  // |lambda . p| from the exact integer key.
  double modulus(const Key& k) const {
    double re = 0.0, im = 0.0;
    for (std::size_t s = 0; s < symbol_values.size(); ++s) {
      re += static_cast<double>(k[2 * s]) * symbol_values[s];
      im += static_cast<double>(k[2 * s + 1]) * symbol_values[s];
    }
    return std::hypot(re, im) / scale.get_d();
  }

  // Visits every q >= 0 with ||q|| <= max_total and q_0 == first (or any q_0 when first < 0).
  template <class Visit>
  void enumerate(int max_total, int first, Visit&& visit) const {
    std::vector<int> exps(modes.size(), 0);
    Key key(width, 0);
    if (modes.empty()) return;
    auto rec = [&](auto&& self, std::size_t pos, int rem) -> void {
      if (pos == modes.size()) {
        visit(exps, key, max_total - rem);
        return;
      }
      int lo = 0, hi = rem;
      if (pos == 0 && first >= 0) lo = hi = first;
      if (lo > rem) return;
      for (std::size_t d = 0; d < width; ++d) key[d] += lo * v[pos][d];
      for (int e = lo; e <= hi; ++e) {
        exps[pos] = e;
        self(self, pos + 1, rem - e);
        if (e < hi)
          for (std::size_t d = 0; d < width; ++d) key[d] += v[pos][d];
      }
      for (std::size_t d = 0; d < width; ++d) key[d] -= hi * v[pos][d];
      exps[pos] = 0;
    };
    rec(rec, 0, max_total);
  }

  MultiIndex to_index(const std::vector<int>& exps) const {
    MultiIndex q;
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i]) q.add(modes[i], exps[i]);
    return q;
  }
};

template <class Work>
void run_split(int threads, int max_first, Work&& work) {
  threads = std::max(1, std::min(threads, max_first + 1));
  if (threads == 1) {
    for (int f = 0; f <= max_first; ++f) work(0, f);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int f = t; f <= max_first; f += threads) work(t, f);
    });
  for (auto& th : pool) th.join();
}

int count_factorizations(const MultiIndex& q, const std::vector<MultiIndex>& gens, std::size_t start,
                         int cap) {
  if (q.empty()) return 1;
  int total = 0;
  for (std::size_t i = start; i < gens.size() && total < cap; ++i)
    if (divides(gens[i], q)) total += count_factorizations(quotient(q, gens[i]), gens, i, cap - total);
  return total;
}

}  // namespace

const char* ideal_name(Ideal j) {
  switch (j) {
    case Ideal::J0: return "J0";
    case Ideal::J1: return "J1";
    case Ideal::J2: return "J2";
  }
  return "?";
}

Ideal ResonanceModule::classify(const MultiIndex& q) const {
  bool one = false;
  for (const auto& a : Q) {
    if (!divides(a, q)) continue;
    one = true;
    MultiIndex r = quotient(q, a);
    for (const auto& b : Q)
      if (divides(b, r)) return Ideal::J2;
  }
  return one ? Ideal::J1 : Ideal::J0;
}

bool ResonanceModule::in_kernel_list(const MultiIndex& q) const {
  return std::binary_search(kernel.begin(), kernel.end(), q);
}

bool ResonanceModule::in_resonant_list(ModeKey k, const MultiIndex& q) const {
  return std::binary_search(resonant.begin(), resonant.end(), TermKey{k, q});
}

Ideal classify(const MultiIndex& q, const ResonanceModule& module) { return module.classify(q); }

SymbolicValue divisor(const FrequencyModel& model, const MultiIndex& q, ModeKey k) {
  return model.divisor(q, k);
}

bool is_resonant(const FrequencyModel& model, const TruncationContext& ctx, const MultiIndex& q,
                 ModeKey k) {
  if (ctx.momentum_enabled && momentum(q, ctx) != ctx.momentum(k)) return false;
  return model.divisor(q, k).is_zero();
}

ResonanceModule enumerate_resonance(const TruncationContext& ctx, const FrequencyModel& model,
                                    int threads) {
  ctx.validate();
  model.validate(ctx);
  ResonanceModule mod;
  mod.window = ctx.degree_cutoff + 1;
  const int W = mod.window;
  IntegerFrequencies freq(ctx, model, W);

  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> targets;
  for (std::size_t i = 0; i < freq.modes.size(); ++i) targets[freq.v[i]].push_back(i);

  struct Found {
    std::vector<MultiIndex> kernel;
    std::vector<TermKey> resonant;
  };
  int nthreads = std::max(1, threads);
  std::vector<Found> found(static_cast<std::size_t>(nthreads));
  run_split(nthreads, W, [&](int t, int first) {
    auto& out = found[static_cast<std::size_t>(t)];
    freq.enumerate(W, first, [&](const std::vector<int>& exps, const Key& key, int total) {
      if (total == 0) return;
      if (IntegerFrequencies::zero(key)) out.kernel.push_back(freq.to_index(exps));
      if (total < 2) return;
      auto it = targets.find(key);
      if (it == targets.end()) return;
      MultiIndex q = freq.to_index(exps);
      for (std::size_t i : it->second) out.resonant.push_back(TermKey{freq.modes[i], q});
    });
  });
  for (auto& f : found) {
    mod.kernel.insert(mod.kernel.end(), f.kernel.begin(), f.kernel.end());
    mod.resonant.insert(mod.resonant.end(), f.resonant.begin(), f.resonant.end());
  }
  std::sort(mod.kernel.begin(), mod.kernel.end());
  std::sort(mod.resonant.begin(), mod.resonant.end());

  for (const auto& q : mod.kernel) {
    bool reducible = std::any_of(mod.Q.begin(), mod.Q.end(), [&](const MultiIndex& g) { return divides(g, q); });
    if (!reducible) mod.Q.push_back(q);
  }
  for (const auto& q : mod.kernel)
    if (count_factorizations(q, mod.Q, 0, 2) != 1)
      throw UniqueFactorizationViolation("element " + format_index(q, ctx) +
                                         " of the resonance module factors in more than one way");

  // Non-diagonal resonances, ordered by degree within each direction.
  std::map<ModeKey, std::vector<MultiIndex>> out;
  for (const auto& key : mod.resonant)
    if (key.q[key.k] == 0) out[key.k].push_back(key.q);
  for (auto& [k, qs] : out) {
    std::sort(qs.begin(), qs.end());
    std::vector<MultiIndex> lifted;
    for (const auto& q : qs) {
      bool reducible = std::any_of(mod.Q.begin(), mod.Q.end(), [&](const MultiIndex& g) { return divides(g, q); });
      if (!reducible) lifted.push_back(q);
    }
    for (const auto& q : qs) {
      long hits = std::count_if(lifted.begin(), lifted.end(), [&](const MultiIndex& g) { return divides(g, q); });
      if (hits != 1)
        throw UniqueFactorizationViolation("resonant field " + format_term(k, q, GaussianRational(1), ctx) +
                                           " has no unique translate decomposition");
    }
    auto& dst = mod.P[k];
    for (const auto& q : lifted) {
      SignedIndex p = to_signed(q);
      p.add(k, -1);
      dst.push_back(p);
      mod.M1 = std::max(mod.M1, q.total());
    }
  }
  mod.delta_equals_m = mod.P.empty();
  for (const auto& q : mod.Q) mod.M = std::max(mod.M, q.total());
  mod.M_star_bound = 2 * mod.M + mod.M1;

  for (const auto& q : mod.Q)
    if (q.total() == W)
      throw CutoffTooSmall("generator " + format_index(q, ctx) + " reaches the degree window; raise the degree cutoff");
  for (const auto& [k, ps] : mod.P)
    for (const auto& p : ps)
      if (p.total() + 1 == W)
        throw CutoffTooSmall("translate generator at mode " + format_mode(k, ctx) +
                             " reaches the degree window; raise the degree cutoff");

  int worst = 0;
  for (const auto& key : mod.resonant)
    if (mod.classify(key.q) != Ideal::J2) worst = std::max(worst, scaling_degree(key));
  mod.M_star_minimal = std::max(1, worst + 1);
  mod.certified = W >= mod.M_star_bound;
  return mod;
}

template <class S>
IdealSplit<S> split_ideals(const VectorField<S>& X, const ResonanceModule& module) {
  IdealSplit<S> out{VectorField<S>(X.context()), VectorField<S>(X.context()), VectorField<S>(X.context())};
  for (const auto& [key, c] : X.terms()) {
    switch (module.classify(key.q)) {
      case Ideal::J0: out.X0.add_term(key.k, key.q, c); break;
      case Ideal::J1: out.X1.add_term(key.k, key.q, c); break;
      case Ideal::J2: out.X2.add_term(key.k, key.q, c); break;
    }
  }
  return out;
}

template IdealSplit<GaussianRational> split_ideals(const VectorField<GaussianRational>&, const ResonanceModule&);
template IdealSplit<Complex> split_ideals(const VectorField<Complex>&, const ResonanceModule&);

DiophantineReport diophantine_audit(const TruncationContext& ctx, const FrequencyModel& model,
                                    const ResonanceModule& module, double tau, int degree_bound,
                                    bool fast_path) {
  model.validate(ctx);
  DiophantineReport rep;
  rep.tau = tau;
  rep.degree_bound = degree_bound;
  rep.mode_cutoff = ctx.mode_cutoff;
  rep.gamma_max = std::numeric_limits<double>::infinity();
  rep.premise_min_divisor = std::numeric_limits<double>::infinity();
  rep.fast_path_requested = fast_path;
  const bool phases = model.has_phases(ctx);
  if (phases) rep.reference_defect = model.reference_defect(ctx);
  rep.fast_path_available = fast_path && phases && rep.reference_defect <= 0.5;

  IntegerFrequencies freq(ctx, model, degree_bound);
  const std::size_t n = freq.modes.size();
  std::vector<Complex> ref(n);
  std::vector<double> w2(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (phases) ref[i] = model.reference(freq.modes[i]);
    double w = freq.modes[i].weight();
    w2[i] = w * w;
  }

  struct Candidate {
    double value;
    double divisor;
    SignedIndex p;
  };
  std::optional<Candidate> best_plain, best_deferred;
  auto consider = [](std::optional<Candidate>& slot, Candidate c) {
    if (!slot || c.value < slot->value || (c.value == slot->value && c.p < slot->p)) slot = std::move(c);
  };

  auto visit_p = [&](const std::vector<int>& p, const Key& key) {
    if (!IntegerFrequencies::momentum_zero(key)) return;
    SignedIndex sp;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i]) sp.add(freq.modes[i], p[i]);
    if (IntegerFrequencies::zero(key)) {
      ++rep.excluded_resonant;
      bool listed = true;
      int neg = -1;
      for (std::size_t i = 0; i < n; ++i)
        if (p[i] < 0) neg = static_cast<int>(i);
      if (neg < 0) {
        if (sp.total() <= module.window) listed = module.in_kernel_list(to_nonnegative(sp));
      } else {
        SignedIndex q = sp;
        q.add(freq.modes[static_cast<std::size_t>(neg)], 1);
        if (q.total() <= module.window && q.total() >= 2)
          listed = module.in_resonant_list(freq.modes[static_cast<std::size_t>(neg)], to_nonnegative(q));
      }
      if (!listed) ++rep.classification_mismatches;
      return;
    }
    ++rep.enumerated;
    double div = freq.modulus(key);
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (p[i]) prod *= 1.0 + static_cast<double>(p[i]) * p[i] * w2[i];
    double value = div * std::pow(prod, tau);
    bool premise = false;
    if (phases) {
      Complex s = 0.0;
      double l1 = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (p[i]) {
          s += static_cast<double>(p[i]) * ref[i];
          l1 += std::abs(p[i]);
        }
      premise = std::abs(s) >= 2.0 * l1;
    }
    if (premise) {
      ++rep.premise_count;
      rep.premise_min_divisor = std::min(rep.premise_min_divisor, div);
      if (div < 1.0) {
        ++rep.premise_violations;
        if (!rep.premise_violation_example) rep.premise_violation_example = sp;
      }
    }
    Candidate c{value, div, std::move(sp)};
    if (premise && rep.fast_path_available)
      consider(best_deferred, std::move(c));
    else
      consider(best_plain, std::move(c));
  };

  // p = a or p = a - e_m with m outside supp(a).
  freq.enumerate(degree_bound, -1, [&](const std::vector<int>& exps, const Key& key, int total) {
    if (total > 0) visit_p(exps, key);
    if (total + 1 > degree_bound) return;
    std::vector<int> p = exps;
    Key k2 = key;
    for (std::size_t m = 0; m < n; ++m) {
      if (exps[m] != 0) continue;
      p[m] = -1;
      for (std::size_t d = 0; d < freq.width; ++d) k2[d] = key[d] - freq.v[m][d];
      visit_p(p, k2);
      p[m] = 0;
    }
  });

  std::optional<Candidate> best = best_plain;
  if (best_deferred) {
    // Deferred vectors satisfy |lambda.p| >= 1, hence value >= 1.
    if (best && best->value < 1.0)
      rep.skipped = rep.premise_count;
    else
      consider(best, *best_deferred);
  }
  if (best) {
    rep.gamma_max = best->value;
    rep.worst_divisor = best->divisor;
    rep.worst_p = best->p;
  }
  return rep;
}

SmallDivisorReport smalldivisor_weight_audit(const TruncationContext& ctx, const FrequencyModel& model,
                                             double delta, int degree_bound, long sample_budget,
                                             std::optional<double> gamma, double tau, double c) {
  if (!(delta > 0)) throw InputError("delta must be positive");
  model.validate(ctx);
  SmallDivisorReport rep;
  rep.delta = delta;
  rep.c = c;
  rep.degree_bound = degree_bound;
  IntegerFrequencies freq(ctx, model, degree_bound);
  const std::size_t n = freq.modes.size();

  auto for_each_pair = [&](auto&& f) {
    freq.enumerate(degree_bound, -1, [&](const std::vector<int>& exps, const Key& key, int total) {
      if (total < 2) return;
      for (std::size_t k = 0; k < n; ++k) {
        if (key.back() != freq.v[k].back()) continue;
        bool resonant = true;
        for (std::size_t d = 0; d + 1 < freq.width && resonant; ++d) resonant = key[d] == freq.v[k][d];
        if (resonant) continue;
        f(exps, key, total, k);
      }
    });
  };

  long count = 0;
  for_each_pair([&](const auto&, const auto&, int, std::size_t) { ++count; });
  long stride = sample_budget > 0 && count > sample_budget ? (count + sample_budget - 1) / sample_budget : 1;

  long idx = 0;
  Key diff(freq.width);
  for_each_pair([&](const std::vector<int>& exps, const Key& key, int total, std::size_t k) {
    if (idx++ % stride != 0) return;
    ++rep.examined;
    for (std::size_t d = 0; d < freq.width; ++d) diff[d] = key[d] - freq.v[k][d];
    double div = freq.modulus(diff);
    MultiIndex q = freq.to_index(exps);
    double E = weight_exponent(q, freq.modes[k], ctx.theta);
    double value = std::exp(-delta * E) / div;
    auto& shell = rep.shell_max[total];
    shell = std::max(shell, value);
    if (value > rep.max_value) {
      rep.max_value = value;
      rep.worst = TermKey{freq.modes[k], q};
    }
    if (gamma) {
      bool light = freq.modes[k].weight() == 1;
      for (std::size_t i = 0; i < n && light; ++i)
        if (exps[i] && freq.modes[i].weight() != 1) light = false;
      if (light) {
        ++rep.case0_checked;
        double bound = std::exp(-delta * total / 2.0) * std::pow(static_cast<double>(total), 12.0 * tau) / *gamma;
        if (value > bound) ++rep.case0_violations;
      }
    }
  });
  rep.implied_C = rep.max_value * std::exp(-c / std::pow(delta, 6));
  if (rep.shell_max.size() >= 2) {
    double earlier = 0.0;
    for (auto it = rep.shell_max.begin(); std::next(it) != rep.shell_max.end(); ++it)
      earlier = std::max(earlier, it->second);
    rep.growth_flag = rep.shell_max.rbegin()->second > 2.0 * earlier;
  }
  return rep;
}

}  // namespace rnf
