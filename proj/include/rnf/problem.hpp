#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rnf/verify.hpp"

namespace rnf {

enum class Arithmetic { exact, floating };

struct FlowTask {
  std::vector<double> rhos{0.05, 0.025, 0.0125};
  double t = 0.25;
  int steps = 1000;
  int transform_steps = 64;
  int directions = 2;
  std::uint64_t seed = 1;
  bool lawson = true;
};

/// Problem definition file (JSON, schema_version 1).
struct Problem {
  std::filesystem::path source;
  /// dim6, dim4, nls, hyperbolic, or empty for an explicit model.
  std::string builder;
  double zeta1 = 1.4142135623730951, zeta2 = 1.7320508075688772, zeta = 1.4142135623730951;
  int p = 1;
  std::optional<std::map<int, Rational>> potential;
  std::set<int> elliptic;

  TruncationContext ctx;
  FrequencyModel model;
  Arithmetic arithmetic = Arithmetic::exact;

  std::optional<std::uint64_t> seed;
  std::vector<std::string> terms;
  std::optional<std::filesystem::path> field_file;

  std::optional<double> tau;
  std::optional<int> degree_bound;
  int m_star = 0;
  FlowTask flow;
  KamParams kam;
};

/// Parse errors carry "line L, column C" positions; schema errors name the offending key.
Problem parse_problem(const std::string& text, const std::filesystem::path& source = {});
Problem load_problem(const std::filesystem::path& path);

/// Builds the model and the field described by the problem. Builder problems
/// replace ctx and model with the builder output.
template <class S>
Example<S> instantiate(const Problem& problem);

/// Generator blocks "@generator <index> <kind> <step>" followed by canonical term lines.
template <class S>
std::string serialize_transform(const TransformLog<S>& log);
template <class S>
TransformLog<S> parse_transform(const std::string& text, const TruncationContext& ctx);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace rnf
