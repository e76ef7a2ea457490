#include "rnf/frequency.hpp"

#include <cmath>

#include "rnf/errors.hpp"

namespace rnf {

SymbolicValue SymbolicValue::basis(std::size_t n, std::size_t s, GaussianRational c) {
  std::vector<GaussianRational> v(n);
  v.at(s) = std::move(c);
  return SymbolicValue(std::move(v));
}

bool SymbolicValue::is_zero() const {
  for (const auto& c : coords_)
    if (!c.is_zero()) return false;
  return true;
}

void SymbolicValue::axpy(long c, const SymbolicValue& o) {
  if (c == 0) return;
  if (coords_.size() < o.coords_.size()) coords_.resize(o.coords_.size());
  for (std::size_t s = 0; s < o.coords_.size(); ++s) {
    if (o.coords_[s].is_zero()) continue;
    coords_[s] += GaussianRational(c) * o.coords_[s];
  }
}

SymbolicValue& SymbolicValue::operator+=(const SymbolicValue& o) {
  axpy(1, o);
  return *this;
}

SymbolicValue& SymbolicValue::operator-=(const SymbolicValue& o) {
  axpy(-1, o);
  return *this;
}

bool operator==(const SymbolicValue& a, const SymbolicValue& b) {
  std::size_t n = std::max(a.coords_.size(), b.coords_.size());
  GaussianRational zero;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& x = s < a.coords_.size() ? a.coords_[s] : zero;
    const auto& y = s < b.coords_.size() ? b.coords_[s] : zero;
    if (!(x == y)) return false;
  }
  return true;
}

std::size_t FrequencyModel::add_symbol(std::string name, Rational exact, double value) {
  if (find_symbol(name)) throw InputError("duplicate symbol '" + name + "'");
  symbols_.push_back(Symbol{std::move(name), std::move(exact), value});
  return symbols_.size() - 1;
}

std::size_t FrequencyModel::add_symbol(std::string name, double value, long max_den) {
  return add_symbol(std::move(name), rational_approximation(value, max_den), value);
}

std::optional<std::size_t> FrequencyModel::find_symbol(const std::string& name) const {
  for (std::size_t s = 0; s < symbols_.size(); ++s)
    if (symbols_[s].name == name) return s;
  return std::nullopt;
}

void FrequencyModel::set_lambda(ModeKey k, SymbolicValue v) {
  if (v.coords().size() > symbols_.size()) throw InputError("frequency refers to unknown symbols");
  lambda_[k] = std::move(v);
}

const SymbolicValue& FrequencyModel::lambda(ModeKey k) const {
  auto it = lambda_.find(k);
  if (it == lambda_.end())
    throw InputError("no frequency for mode (" + std::to_string(k.j) + "," +
                     std::to_string(k.sigma) + ")");
  return it->second;
}

Complex FrequencyModel::numeric(const SymbolicValue& v) const {
  Complex out = 0.0;
  for (std::size_t s = 0; s < v.coords().size(); ++s)
    if (!v.coords()[s].is_zero()) out += v.coords()[s].to_complex() * symbols_[s].value;
  return out;
}

GaussianRational FrequencyModel::exact(const SymbolicValue& v) const {
  GaussianRational out;
  for (std::size_t s = 0; s < v.coords().size(); ++s)
    if (!v.coords()[s].is_zero()) out += v.coords()[s] * GaussianRational(symbols_[s].exact);
  return out;
}

template <class S>
S FrequencyModel::value(const SymbolicValue& v) const {
  if (v.is_zero()) return S{};
  GaussianRational e = exact(v);
  if (e.is_zero()) throw NumericCollision("symbolically nonzero value vanishes at the numeric symbol values");
  return ScalarTraits<S>::from_pair(e, numeric(v));
}

template GaussianRational FrequencyModel::value(const SymbolicValue&) const;
template Complex FrequencyModel::value(const SymbolicValue&) const;

SymbolicValue FrequencyModel::dot(const SignedIndex& p) const {
  SymbolicValue out(std::vector<GaussianRational>(symbols_.size()));
  for (const auto& [k, e] : p.entries()) out.axpy(e, lambda(k));
  return out;
}

SymbolicValue FrequencyModel::dot(const MultiIndex& q) const {
  SymbolicValue out(std::vector<GaussianRational>(symbols_.size()));
  for (const auto& [k, e] : q.entries()) out.axpy(e, lambda(k));
  return out;
}

SymbolicValue FrequencyModel::divisor(const MultiIndex& q, ModeKey k) const {
  SymbolicValue out = dot(q);
  out.axpy(-1, lambda(k));
  return out;
}

void FrequencyModel::validate(const TruncationContext& ctx) const {
  for (ModeKey k : ctx.modes()) {
    const auto& v = lambda(k);
    if (v.is_zero()) throw ZeroFrequency("zero frequency at mode j=" + std::to_string(k.j));
    if (exact(v).is_zero()) throw NumericCollision("frequency vanishes numerically at mode j=" + std::to_string(k.j));
  }
  for (const auto& [k, v] : lambda_)
    if (!ctx.contains(k)) throw InputError("frequency given for a mode outside the cutoff");
}

bool FrequencyModel::has_phases(const TruncationContext& ctx) const {
  for (ModeKey k : ctx.modes())
    if (!phases.count(k)) return false;
  return true;
}

Complex FrequencyModel::reference(ModeKey k) const {
  auto it = phases.find(k);
  if (it == phases.end()) throw InputError("missing phase for mode j=" + std::to_string(k.j));
  return std::polar(std::pow(static_cast<double>(k.weight()), alpha), it->second);
}

double FrequencyModel::reference_defect(const TruncationContext& ctx) const {
  double eta = 0.0;
  for (ModeKey k : ctx.modes()) eta = std::max(eta, std::abs(numeric(lambda(k)) - reference(k)));
  return eta;
}

std::optional<double> FrequencyModel::phase_separation(const TruncationContext& ctx) const {
  if (ctx.index_set == IndexSet::finite) return std::nullopt;
  double best = INFINITY;
  for (ModeKey k : ctx.modes()) {
    ModeKey mirror{-k.j, -k.sigma};
    if (!ctx.contains(mirror)) continue;
    Complex a = std::polar(1.0, phases.at(k));
    Complex b = std::polar(1.0, phases.at(mirror));
    best = std::min(best, std::abs(a - b));
  }
  return best;
}

template <class S>
VectorField<S> linear_field(const FrequencyModel& model, const TruncationContext& ctx) {
  VectorField<S> D(ctx);
  for (ModeKey k : ctx.modes()) D.add_term(k, MultiIndex::unit(k), model.value<S>(model.lambda(k)));
  return D;
}

template VectorField<GaussianRational> linear_field(const FrequencyModel&, const TruncationContext&);
template VectorField<Complex> linear_field(const FrequencyModel&, const TruncationContext&);

}  // namespace rnf
