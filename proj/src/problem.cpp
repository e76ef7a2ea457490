#include "rnf/problem.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rnf/errors.hpp"
#include "rnf/textio.hpp"

namespace rnf {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw InputError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(where + "." + key + ": missing or of the wrong type");
  }
}

template <class T>
std::optional<T> get_opt(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return get<T>(obj, key, where);
}

Rational parse_rational(const std::string& s, const std::string& where) {
  try {
    Rational r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw InputError(where + ": bad rational '" + s + "'");
  }
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void parse_model_explicit(const json& m, Problem& pr) {
  const std::string where = "model";
  if (!m.contains("symbols") || !m.contains("lambda")) throw InputError("model: needs symbols and lambda or a builder");
  for (const auto& s : m.at("symbols")) {
    check_keys(s, "model.symbols[]", {"name", "value", "exact"});
    auto name = get<std::string>(s, "name", "model.symbols[]");
    auto value = get<double>(s, "value", "model.symbols[]");
    if (pr.model.find_symbol(name)) throw InputError("model.symbols: duplicate symbol '" + name + "'");
    if (auto exact = get_opt<std::string>(s, "exact", "model.symbols[]"))
      pr.model.add_symbol(name, parse_rational(*exact, "model.symbols[" + name + "]"), value);
    else
      pr.model.add_symbol(name, value);
  }
  const std::size_t ns = pr.model.symbols().size();
  const auto& lam = m.at("lambda");
  if (!lam.is_object()) throw InputError("model.lambda: expected an object");
  for (const auto& [mode_text, coords] : lam.items()) {
    const std::string w = "model.lambda[" + mode_text + "]";
    ModeKey k;
    try {
      k = parse_mode(mode_text, pr.ctx);
    } catch (const InputError& e) {
      throw InputError(w + ": " + e.what());
    }
    if (!coords.is_object()) throw InputError(w + ": expected a map from symbol to coefficient");
    SymbolicValue v(std::vector<GaussianRational>(ns, GaussianRational(0)));
    for (const auto& [sym, c] : coords.items()) {
      auto idx = pr.model.find_symbol(sym);
      if (!idx) throw InputError(w + ": unknown symbol '" + sym + "'");
      if (!c.is_string()) throw InputError(w + "." + sym + ": coefficient must be a string 're [im]'");
      std::istringstream in(c.get<std::string>());
      std::string re, im = "0", extra;
      in >> re;
      if (!(in >> im)) im = "0";
      if (re.empty() || (in >> extra)) throw InputError(w + "." + sym + ": expected 're [im]'");
      try {
        v += SymbolicValue::basis(ns, *idx, ScalarTraits<GaussianRational>::parse(re, im));
      } catch (const std::invalid_argument& e) {
        throw InputError(w + "." + sym + ": " + e.what());
      }
    }
    pr.model.set_lambda(k, v);
  }
  if (auto a = get_opt<double>(m, "alpha", where)) pr.model.alpha = *a;
  if (m.contains("phases")) {
    if (!m.at("phases").is_object()) throw InputError("model.phases: expected an object");
    for (const auto& [mode_text, phi] : m.at("phases").items()) {
      if (!phi.is_number()) throw InputError("model.phases[" + mode_text + "]: expected a number");
      pr.model.phases[parse_mode(mode_text, pr.ctx)] = phi.get<double>();
    }
  }
  if (auto c = get_opt<double>(m, "phase_separation_C", where)) pr.model.phase_separation_C = *c;
}

}  // namespace

Problem parse_problem(const std::string& text, const std::filesystem::path& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("parse error at " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  check_keys(doc, "problem", {"schema_version", "model", "truncation", "field", "tasks"});
  if (get<int>(doc, "schema_version", "problem") != 1) throw InputError("problem: unsupported schema_version");
  if (!doc.contains("model") || !doc.contains("truncation")) throw InputError("problem: model and truncation are required");

  Problem pr;
  pr.source = source;
  const json& m = doc.at("model");
  check_keys(m, "model", {"builder", "zeta1", "zeta2", "zeta", "p", "potential", "elliptic", "symbols", "lambda",
                          "alpha", "phases", "phase_separation_C"});
  pr.builder = get_opt<std::string>(m, "builder", "model").value_or("");

  const json& t = doc.at("truncation");
  check_keys(t, "truncation", {"index_set", "dimension", "mode_cutoff", "degree_cutoff", "theta", "momentum", "arithmetic"});
  const int D = get<int>(t, "degree_cutoff", "truncation");
  const double theta = get_opt<double>(t, "theta", "truncation").value_or(0.5);
  auto arith = get_opt<std::string>(t, "arithmetic", "truncation").value_or("exact");
  if (arith == "exact")
    pr.arithmetic = Arithmetic::exact;
  else if (arith == "float")
    pr.arithmetic = Arithmetic::floating;
  else
    throw InputError("truncation.arithmetic: expected exact or float");

  if (pr.builder.empty()) {
    auto kind = get<std::string>(t, "index_set", "truncation");
    if (kind == "finite") {
      pr.ctx = TruncationContext::finite(get<int>(t, "dimension", "truncation"), D, theta);
    } else if (kind == "lattice") {
      pr.ctx = TruncationContext::lattice(get<int>(t, "mode_cutoff", "truncation"), D,
                                          get_opt<bool>(t, "momentum", "truncation").value_or(true), theta);
    } else {
      throw InputError("truncation.index_set: expected finite or lattice");
    }
    try {
      pr.ctx.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("truncation: ") + e.what());
    }
    parse_model_explicit(m, pr);
  } else {
    for (const char* k : {"symbols", "lambda", "alpha", "phases", "phase_separation_C"})
      if (m.contains(k)) throw InputError(std::string("model.") + k + ": not allowed together with a builder");
    if (theta != 0.5) throw InputError("truncation.theta: builders use theta = 1/2");
    if (pr.builder == "dim6" || pr.builder == "dim4") {
      pr.ctx = TruncationContext::finite(pr.builder == "dim6" ? 6 : 4, D);
      if (t.contains("dimension") && get<int>(t, "dimension", "truncation") != static_cast<int>(pr.ctx.dimension()))
        throw InputError("truncation.dimension: does not match the builder");
    } else if (pr.builder == "nls" || pr.builder == "hyperbolic") {
      pr.ctx = TruncationContext::lattice(get<int>(t, "mode_cutoff", "truncation"), D, true);
      if (!get_opt<bool>(t, "momentum", "truncation").value_or(true))
        throw InputError("truncation.momentum: lattice builders conserve momentum");
    } else {
      throw InputError("model.builder: unknown builder '" + pr.builder + "'");
    }
    try {
      pr.ctx.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("truncation: ") + e.what());
    }
    pr.zeta1 = get_opt<double>(m, "zeta1", "model").value_or(pr.zeta1);
    pr.zeta2 = get_opt<double>(m, "zeta2", "model").value_or(pr.zeta2);
    pr.zeta = get_opt<double>(m, "zeta", "model").value_or(pr.zeta);
    pr.p = get_opt<int>(m, "p", "model").value_or(pr.p);
    if (m.contains("potential")) {
      std::map<int, Rational> V;
      const auto& pv = m.at("potential");
      if (!pv.is_object()) throw InputError("model.potential: expected an object");
      for (const auto& [j, v] : pv.items()) {
        int jj;
        try {
          std::size_t used = 0;
          jj = std::stoi(j, &used);
          if (used != j.size()) throw std::invalid_argument(j);
        } catch (const std::exception&) {
          throw InputError("model.potential: bad mode index '" + j + "'");
        }
        if (!v.is_string()) throw InputError("model.potential[" + j + "]: expected a rational string");
        V[jj] = parse_rational(v.get<std::string>(), "model.potential[" + j + "]");
      }
      pr.potential = V;
    }
    if (m.contains("elliptic")) pr.elliptic = get<std::set<int>>(m, "elliptic", "model");
  }

  if (doc.contains("field")) {
    const json& f = doc.at("field");
    check_keys(f, "field", {"seed", "terms", "file"});
    if (auto s = get_opt<std::uint64_t>(f, "seed", "field")) pr.seed = *s;
    if (f.contains("terms")) pr.terms = get<std::vector<std::string>>(f, "terms", "field");
    if (auto file = get_opt<std::string>(f, "file", "field")) {
      std::filesystem::path p(*file);
      if (p.is_relative() && !source.empty()) p = source.parent_path() / p;
      pr.field_file = p;
    }
  }

  if (doc.contains("tasks")) {
    const json& k = doc.at("tasks");
    check_keys(k, "tasks", {"tau", "degree_bound", "m_star", "flow", "kam"});
    pr.tau = get_opt<double>(k, "tau", "tasks");
    pr.degree_bound = get_opt<int>(k, "degree_bound", "tasks");
    pr.m_star = get_opt<int>(k, "m_star", "tasks").value_or(0);
    if (k.contains("flow")) {
      const json& fl = k.at("flow");
      check_keys(fl, "tasks.flow", {"rhos", "t", "steps", "transform_steps", "directions", "seed", "lawson"});
      const std::string w = "tasks.flow";
      if (fl.contains("rhos")) pr.flow.rhos = get<std::vector<double>>(fl, "rhos", w);
      pr.flow.t = get_opt<double>(fl, "t", w).value_or(pr.flow.t);
      pr.flow.steps = get_opt<int>(fl, "steps", w).value_or(pr.flow.steps);
      pr.flow.transform_steps = get_opt<int>(fl, "transform_steps", w).value_or(pr.flow.transform_steps);
      pr.flow.directions = get_opt<int>(fl, "directions", w).value_or(pr.flow.directions);
      pr.flow.seed = get_opt<std::uint64_t>(fl, "seed", w).value_or(pr.flow.seed);
      pr.flow.lawson = get_opt<bool>(fl, "lawson", w).value_or(pr.flow.lawson);
      if (pr.flow.steps < 1 || pr.flow.transform_steps < 1 || pr.flow.directions < 1)
        throw InputError("tasks.flow: step counts and directions must be positive");
      for (double r : pr.flow.rhos)
        if (!(r > 0)) throw InputError("tasks.flow.rhos: radii must be positive");
    }
    if (k.contains("kam")) {
      const json& kp = k.at("kam");
      check_keys(kp, "tasks.kam", {"gamma", "r_prime", "s_base", "s_prime", "K1", "c", "norm_samples"});
      const std::string w = "tasks.kam";
      pr.kam.gamma = get_opt<double>(kp, "gamma", w).value_or(pr.kam.gamma);
      pr.kam.r_prime = get_opt<double>(kp, "r_prime", w).value_or(pr.kam.r_prime);
      pr.kam.s_base = get_opt<double>(kp, "s_base", w).value_or(pr.kam.s_base);
      pr.kam.s_prime = get_opt<double>(kp, "s_prime", w).value_or(pr.kam.s_prime);
      pr.kam.K1 = get_opt<double>(kp, "K1", w).value_or(pr.kam.K1);
      pr.kam.c = get_opt<double>(kp, "c", w).value_or(pr.kam.c);
      pr.kam.norm_samples = get_opt<int>(kp, "norm_samples", w).value_or(pr.kam.norm_samples);
    }
  }
  return pr;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load_problem(const std::filesystem::path& path) {
  try {
    return parse_problem(read_file(path), path);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InputError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

template <class S>
Example<S> instantiate(const Problem& pr) {
  const int D = pr.ctx.degree_cutoff;
  const std::uint64_t seed = pr.seed.value_or(0);
  Example<S> ex{pr.ctx, pr.model, VectorField<S>(pr.ctx)};
  if (pr.builder == "dim6") {
    ex = build_example_dim6<S>(pr.zeta1, pr.zeta2, seed, D);
  } else if (pr.builder == "dim4") {
    ex = build_example_dim4<S>(pr.zeta, D);
  } else if (pr.builder == "nls") {
    ex = build_example_nls<S>(pr.p, pr.potential.value_or(default_potential(pr.ctx.mode_cutoff)),
                              pr.ctx.mode_cutoff, D);
  } else if (pr.builder == "hyperbolic") {
    ex = build_example_hyperbolic<S>(pr.potential.value_or(default_potential(pr.ctx.mode_cutoff)),
                                     pr.ctx.mode_cutoff, D, seed, pr.elliptic);
  } else {
    ex.model.validate(ex.ctx);
    ex.W = linear_field<S>(ex.model, ex.ctx);
  }
  if (pr.field_file) {
    try {
      ex.W = parse_vector_field<S>(read_file(*pr.field_file), ex.ctx);
    } catch (const InputError& e) {
      throw InputError(pr.field_file->string() + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < pr.terms.size(); ++i) {
    try {
      parse_terms_into(ex.W, pr.terms[i], 1);
    } catch (const InputError& e) {
      throw InputError("field.terms[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return ex;
}

template <class S>
std::string serialize_transform(const TransformLog<S>& log) {
  std::string out = "# Psi = Phi_F0 o ... o Phi_F(n-1)\n";
  for (std::size_t i = 0; i < log.size(); ++i) {
    out += "@generator " + std::to_string(i) + " " + log.info[i].kind + " " + std::to_string(log.info[i].step) + "\n";
    out += serialize(log.F[i]);
  }
  return out;
}

template <class S>
TransformLog<S> parse_transform(const std::string& text, const TruncationContext& ctx) {
  TransformLog<S> log;
  std::istringstream in(text);
  std::string line, block;
  int lineno = 0, block_start = 0;
  auto flush = [&]() {
    if (log.empty()) return;
    parse_terms_into(log.F.back(), block, block_start);
    block.clear();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("@generator", 0) == 0) {
      flush();
      std::istringstream hs(line.substr(10));
      std::size_t idx;
      Generator g;
      if (!(hs >> idx >> g.kind >> g.step) || idx != log.size())
        throw InputError("line " + std::to_string(lineno) + ": bad generator header");
      log.push(VectorField<S>(ctx), g);
      block_start = lineno + 1;
      continue;
    }
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      if (!log.empty()) block += "\n";
      continue;
    }
    if (log.empty()) throw InputError("line " + std::to_string(lineno) + ": term before the first generator header");
    block += line + "\n";
  }
  flush();
  return log;
}

#define RNF_PROBLEM(S)                                                                     \
  template Example<S> instantiate(const Problem&);                                         \
  template std::string serialize_transform(const TransformLog<S>&);                        \
  template TransformLog<S> parse_transform(const std::string&, const TruncationContext&);

RNF_PROBLEM(GaussianRational)
RNF_PROBLEM(Complex)

}  // namespace rnf
