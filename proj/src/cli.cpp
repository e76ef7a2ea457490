#include "rnf/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnf/errors.hpp"
#include "rnf/problem.hpp"
#include "rnf/textio.hpp"

namespace rnf {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string problem;
  bool exact = false;
  bool floating = false;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string json_path;
  std::string out_dir;
  std::string transform_dir;
  std::string csv_path;
  std::optional<double> tau;
  std::optional<int> degree;
  bool brute_force = false;
};

// JSON has no infinities; +inf is written as null next to an explicit flag.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json problem_json(const Problem& pr, const TruncationContext& ctx) {
  json j;
  j["builder"] = pr.builder.empty() ? json(nullptr) : json(pr.builder);
  j["arithmetic"] = pr.arithmetic == Arithmetic::exact ? "exact" : "float";
  j["seed"] = pr.seed ? json(*pr.seed) : json(nullptr);
  j["index_set"] = ctx.index_set == IndexSet::finite ? "finite" : "lattice";
  j["dimension"] = ctx.dimension();
  j["mode_cutoff"] = ctx.mode_cutoff;
  j["degree_cutoff"] = ctx.degree_cutoff;
  j["momentum"] = ctx.momentum_enabled;
  j["theta"] = ctx.theta;
  return j;
}

json module_json(const ResonanceModule& m, const TruncationContext& ctx) {
  json j;
  j["window"] = m.window;
  json gens = json::array();
  for (const auto& q : m.Q) gens.push_back(format_index(q, ctx));
  j["generators"] = gens;
  json p = json::object();
  for (const auto& [k, ps] : m.P) {
    json list = json::array();
    for (const auto& s : ps) list.push_back(format_index(s, ctx));
    p[format_mode(k, ctx)] = list;
  }
  j["translates"] = p;
  j["M"] = m.M;
  j["M1"] = m.M1;
  j["M_star_minimal"] = m.M_star_minimal;
  j["M_star_bound"] = m.M_star_bound;
  j["certified"] = m.certified;
  j["delta_equals_m"] = m.delta_equals_m;
  j["kernel_size"] = m.kernel.size();
  j["resonant_fields"] = m.resonant.size();
  return j;
}

json diophantine_json(const DiophantineReport& r, const TruncationContext& ctx) {
  json j;
  j["tau"] = r.tau;
  j["degree_bound"] = r.degree_bound;
  j["mode_cutoff"] = r.mode_cutoff;
  j["gamma_max"] = number(r.gamma_max);
  j["unconstrained"] = !std::isfinite(r.gamma_max);
  j["worst_p"] = r.worst_p ? json(format_index(*r.worst_p, ctx)) : json(nullptr);
  j["worst_divisor"] = r.worst_divisor;
  j["enumerated"] = r.enumerated;
  j["excluded_resonant"] = r.excluded_resonant;
  j["classification_mismatches"] = r.classification_mismatches;
  j["fast_path_requested"] = r.fast_path_requested;
  j["fast_path_available"] = r.fast_path_available;
  j["reference_defect"] = number(r.reference_defect);
  j["premise_count"] = r.premise_count;
  j["premise_violations"] = r.premise_violations;
  j["premise_violation_example"] =
      r.premise_violation_example ? json(format_index(*r.premise_violation_example, ctx)) : json(nullptr);
  j["premise_min_divisor"] = number(r.premise_min_divisor);
  j["skipped"] = r.skipped;
  return j;
}

json trace_json(const KamTrace& t) {
  json j;
  j["prenormal_steps"] = t.prenormal_steps;
  j["kam_steps"] = t.steps.size();
  j["initial_gianna"] = number(t.initial_gianna);
  json steps = json::array();
  for (const auto& s : t.steps) {
    json r;
    r["step"] = s.step;
    r["ord_X"] = s.ord_X;
    r["ord_X_next"] = s.ord_X_next;
    r["doubled"] = s.doubled;
    r["r"] = s.r;
    r["s"] = s.s;
    r["rho"] = s.rho;
    r["sigma"] = s.sigma;
    r["norm_X"] = number(s.norm_X);
    r["norm_Z"] = number(s.norm_Z);
    r["norm_N"] = number(s.norm_N);
    r["eps"] = number(s.eps);
    r["Theta"] = number(s.Theta);
    r["smallness_lhs"] = number(s.smallness_lhs);
    r["smallness_rhs"] = number(s.smallness_rhs);
    r["smallness_ok"] = s.smallness_ok;
    r["generator_terms"] = s.generator_terms;
    steps.push_back(r);
  }
  j["steps"] = steps;
  return j;
}

json tangency_json(const TangencyReport& t) {
  json j;
  j["tangent"] = t.tangent;
  j["offending"] = t.offending;
  return j;
}

json scaling_json(const ScalingReport& s, const FlowTask& f) {
  json j;
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back({{"rho", r.rho}, {"on_sigma", r.on_sigma}, {"off_sigma", r.off_sigma}});
  j["rows"] = rows;
  j["slope_on_sigma"] = number(s.slope_on);
  j["slope_off_sigma"] = number(s.slope_off);
  j["t"] = f.t;
  j["steps"] = f.steps;
  j["transform_steps"] = f.transform_steps;
  j["directions"] = f.directions;
  j["seed"] = f.seed;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

FlowConfig flow_config(const FlowTask& f) {
  FlowConfig c;
  c.steps = f.steps;
  c.transform_steps = f.transform_steps;
  c.lawson = f.lawson;
  c.horizon = f.t;
  return c;
}

void print_module(std::ostream& out, const ResonanceModule& m, const TruncationContext& ctx) {
  out << "resonance module (window " << m.window << ")\n  generators:";
  if (m.Q.empty()) out << " none";
  for (const auto& q : m.Q) out << " {" << format_index(q, ctx) << "}";
  out << "\n";
  for (const auto& [k, ps] : m.P)
    for (const auto& p : ps) out << "  translate for " << format_mode(k, ctx) << ": {" << format_index(p, ctx) << "}\n";
  out << "  M = " << m.M << ", M1 = " << m.M1 << ", M* minimal = " << m.M_star_minimal
      << ", M* bound = " << m.M_star_bound << (m.certified ? "" : " (window below bound)") << "\n";
  out << "  Delta = M: " << (m.delta_equals_m ? "true" : "false") << "\n";
}

void print_diophantine(std::ostream& out, const DiophantineReport& r, const TruncationContext& ctx) {
  out << "diophantine audit (tau " << r.tau << ", degree <= " << r.degree_bound << ")\n";
  if (std::isfinite(r.gamma_max))
    out << "  gamma_max = " << std::setprecision(17) << r.gamma_max << std::setprecision(6) << " at {"
        << format_index(*r.worst_p, ctx) << "}\n";
  else
    out << "  gamma_max unconstrained (nothing enumerated)\n";
  out << "  enumerated " << r.enumerated << ", excluded resonant " << r.excluded_resonant << ", mismatches "
      << r.classification_mismatches << "\n";
  out << "  fast path " << (r.fast_path_available ? "available" : "unavailable") << " (reference defect "
      << r.reference_defect << "), premise count " << r.premise_count << ", violations " << r.premise_violations
      << "\n";
}

template <class S>
struct Pipeline {
  Problem problem;
  Example<S> ex;
  ResonanceModule module;
};

template <class S>
Pipeline<S> analyze_pipeline(const Problem& pr, int threads) {
  Pipeline<S> p{pr, instantiate<S>(pr), {}};
  p.ex.model.validate(p.ex.ctx);
  p.module = enumerate_resonance(p.ex.ctx, p.ex.model, threads);
  return p;
}

void emit_json(const Options& o, const json& report) {
  if (!o.json_path.empty()) write_atomic(o.json_path, dump(report));
}

template <class S>
int cmd_analyze(const Problem& pr, const Options& o, std::ostream& out) {
  auto p = analyze_pipeline<S>(pr, o.threads);
  json report;
  report["command"] = "analyze";
  report["problem"] = problem_json(pr, p.ex.ctx);
  report["resonance"] = module_json(p.module, p.ex.ctx);
  std::optional<DiophantineReport> dio;
  if (pr.tau && pr.degree_bound) {
    dio = diophantine_audit(p.ex.ctx, p.ex.model, p.module, *pr.tau, *pr.degree_bound);
    report["diophantine"] = diophantine_json(*dio, p.ex.ctx);
  }
  emit_json(o, report);
  print_module(out, p.module, p.ex.ctx);
  if (dio) print_diophantine(out, *dio, p.ex.ctx);
  return exit_ok;
}

template <class S>
int cmd_normalize(const Problem& pr, const Options& o, std::ostream& out) {
  auto p = analyze_pipeline<S>(pr, o.threads);
  const auto& ctx = p.ex.ctx;
  auto res = normalize(p.ex.W, p.ex.model, p.module, pr.kam, true, pr.m_star);
  VectorField<S> nf = res.field.assemble();
  const bool residual_zero = decompose(nf, p.ex.model, p.module, res.field.m_star).X.is_zero();
  auto tangency = check_tangent_sigma(nf, p.ex.model, p.module, res.field.m_star);

  json report;
  report["command"] = "normalize";
  report["problem"] = problem_json(pr, ctx);
  report["resonance"] = module_json(p.module, ctx);
  report["trace"] = trace_json(res.trace);
  report["normal_form"] = {{"terms", nf.size()},
                           {"m_star", res.field.m_star},
                           {"residual_zero", residual_zero},
                           {"generators", res.log.size()},
                           {"truncated", nf.truncated()}};
  report["tangency"] = tangency_json(tangency);

  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    write_atomic(dir / "input_field.txt", serialize(p.ex.W));
    write_atomic(dir / "normal_form.txt", serialize(nf));
    write_atomic(dir / "transform.txt", serialize_transform(res.log));
    write_atomic(dir / "trace.json", dump(trace_json(res.trace)));
    write_atomic(dir / "report.json", dump(report));
  }
  emit_json(o, report);

  print_module(out, p.module, ctx);
  out << "normalization: " << res.trace.prenormal_steps << " prenormal steps, " << res.trace.steps.size()
      << " KAM steps\n";
  for (const auto& s : res.trace.steps)
    out << "  step " << s.step << ": ord X " << s.ord_X << " -> " << (s.ord_X_next > 0 ? std::to_string(s.ord_X_next) : "none")
        << ", generator terms " << s.generator_terms << "\n";
  out << "  residual I0+I1 " << (residual_zero ? "zero" : "NONZERO") << ", normal form terms " << nf.size() << "\n";
  out << "  tangent to Sigma: " << (tangency.tangent ? "true" : "false") << "\n";
  return exit_ok;
}

template <class S>
int cmd_verify(const Problem& pr, const Options& o, std::ostream& out) {
  const fs::path dir(o.transform_dir);
  for (const char* f : {"input_field.txt", "normal_form.txt", "transform.txt"})
    if (!fs::exists(dir / f)) throw InputError("missing artifact " + (dir / f).string());
  auto p = analyze_pipeline<S>(pr, o.threads);
  const auto& ctx = p.ex.ctx;
  auto parse = [&](const char* name, auto fn) {
    try {
      return fn(read_file(dir / name));
    } catch (const InputError& e) {
      throw InputError((dir / name).string() + ": " + e.what());
    }
  };
  auto W0 = parse("input_field.txt", [&](const std::string& t) { return parse_vector_field<S>(t, ctx); });
  auto nf = parse("normal_form.txt", [&](const std::string& t) { return parse_vector_field<S>(t, ctx); });
  auto log = parse("transform.txt", [&](const std::string& t) { return parse_transform<S>(t, ctx); });

  auto tangency = check_tangent_sigma(nf, p.ex.model, p.module, pr.m_star);
  auto sigma = SigmaSpec::from_module(p.module);
  auto scaling = conjugacy_scaling(W0, log, sigma, pr.flow.rhos, pr.flow.t, flow_config(pr.flow), pr.flow.seed,
                                   pr.flow.directions);

  json report;
  report["command"] = "verify";
  report["problem"] = problem_json(pr, ctx);
  report["resonance"] = module_json(p.module, ctx);
  report["tangency"] = tangency_json(tangency);
  json zeroed = json::array();
  for (ModeKey k : sigma.zeroed) zeroed.push_back(format_mode(k, ctx));
  report["sigma_zeroed"] = zeroed;
  report["scaling"] = scaling_json(scaling, pr.flow);
  emit_json(o, report);

  if (!o.csv_path.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "rho,on_sigma,off_sigma\n";
    for (const auto& r : scaling.rows) csv << r.rho << "," << r.on_sigma << "," << r.off_sigma << "\n";
    write_atomic(o.csv_path, csv.str());
  }

  out << "tangent to Sigma: " << (tangency.tangent ? "true" : "false") << "\n";
  for (const auto& t : tangency.offending) out << "  offending: " << t << "\n";
  out << "conjugacy error at t = " << pr.flow.t << " (" << pr.flow.directions << " directions per row)\n";
  out << "  rho          on Sigma     off Sigma\n";
  for (const auto& r : scaling.rows)
    out << "  " << std::left << std::setw(12) << r.rho << " " << std::setw(12) << r.on_sigma << " " << r.off_sigma
        << std::right << "\n";
  out << "  slope on Sigma " << scaling.slope_on << ", off Sigma " << scaling.slope_off << "\n";
  return exit_ok;
}

template <class S>
int cmd_diophantine(const Problem& pr, const Options& o, std::ostream& out) {
  auto p = analyze_pipeline<S>(pr, o.threads);
  const double tau = o.tau ? *o.tau : pr.tau.value_or(2.0);
  const int K = o.degree ? *o.degree : pr.degree_bound.value_or(p.ex.ctx.degree_cutoff);
  auto r = diophantine_audit(p.ex.ctx, p.ex.model, p.module, tau, K, !o.brute_force);
  json report;
  report["command"] = "diophantine";
  report["problem"] = problem_json(pr, p.ex.ctx);
  report["diophantine"] = diophantine_json(r, p.ex.ctx);
  emit_json(o, report);
  print_diophantine(out, r, p.ex.ctx);
  return exit_ok;
}

template <class S>
int dispatch(const std::string& cmd, const Problem& pr, const Options& o, std::ostream& out) {
  if (cmd == "analyze") return cmd_analyze<S>(pr, o, out);
  if (cmd == "normalize") return cmd_normalize<S>(pr, o, out);
  if (cmd == "verify") return cmd_verify<S>(pr, o, out);
  return cmd_diophantine<S>(pr, o, out);
}

void common_options(CLI::App* sub, Options& o) {
  sub->add_option("problem", o.problem, "problem definition file (JSON)")->required();
  auto* ex = sub->add_flag("--exact", o.exact, "exact rational arithmetic");
  auto* fl = sub->add_flag("--float", o.floating, "double precision arithmetic");
  ex->excludes(fl);
  sub->add_option("--seed", o.seed, "perturbation seed (overrides field.seed)");
  sub->add_option("--threads", o.threads, "worker threads for enumeration")->check(CLI::PositiveNumber);
  sub->add_option("--json", o.json_path, "write the machine report to this path");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonant normal forms of truncated vector fields", "rnf"};
  app.require_subcommand(1);
  Options o;
  auto* analyze = app.add_subcommand("analyze", "resonance module and optional Diophantine audit");
  auto* norm = app.add_subcommand("normalize", "prenormalize and run the KAM iteration");
  auto* verify = app.add_subcommand("verify", "tangency check and conjugacy scaling");
  auto* dio = app.add_subcommand("diophantine", "Diophantine audit modulo the resonance module");
  for (auto* s : {analyze, norm, verify, dio}) common_options(s, o);
  norm->add_option("--out", o.out_dir, "directory for the normal form and transform artifacts");
  verify->add_option("--transform", o.transform_dir, "directory written by normalize --out")->required();
  verify->add_option("--csv", o.csv_path, "write the scaling table as CSV");
  dio->add_option("--tau", o.tau, "Diophantine exponent");
  dio->add_option("--degree", o.degree, "degree bound for the scan");
  dio->add_flag("--brute-force", o.brute_force, "disable the fast path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? exit_ok : exit_input;
  }
  std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Problem pr = load_problem(o.problem);
    if (o.exact) pr.arithmetic = Arithmetic::exact;
    if (o.floating) pr.arithmetic = Arithmetic::floating;
    if (o.seed) pr.seed = o.seed;
    return pr.arithmetic == Arithmetic::exact ? dispatch<GaussianRational>(cmd, pr, o, out)
                                              : dispatch<Complex>(cmd, pr, o, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const ModelAssumptionError& e) {
    err << "model assumption violated: " << e.what() << "\n";
    return exit_model;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis violated: " << e.what();
    if (!e.term().empty()) err << ": " << e.term();
    err << "\n";
    return exit_hypothesis;
  } catch (const ResonantTermInRange& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return exit_hypothesis;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace rnf
