#include "rnf/textio.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "rnf/errors.hpp"

namespace rnf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int parse_int(std::string_view s) {
  std::string t(trim(s));
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    throw InputError("bad integer '" + t + "'");
  }
  if (used != t.size()) throw InputError("bad integer '" + t + "'");
  return v;
}

template <bool Signed>
BasicMultiIndex<Signed> parse_index_impl(std::string_view text, const TruncationContext& ctx) {
  BasicMultiIndex<Signed> q;
  text = trim(text);
  if (text == "0") return q;
  for (auto tok : split_ws(text)) {
    auto colon = tok.rfind(':');
    if (colon == std::string_view::npos) throw InputError("expected mode:exp, got '" + std::string(tok) + "'");
    ModeKey k = parse_mode(tok.substr(0, colon), ctx);
    int e = parse_int(tok.substr(colon + 1));
    if (e == 0) throw InputError("zero exponent in '" + std::string(tok) + "'");
    if (q[k] != 0) throw InputError("repeated mode in '" + std::string(text) + "'");
    try {
      q.add(k, e);
    } catch (const std::invalid_argument& ex) {
      throw InputError(ex.what());
    }
  }
  return q;
}

template <bool Signed>
std::string format_index_impl(const BasicMultiIndex<Signed>& q, const TruncationContext& ctx) {
  if (q.empty()) return "0";
  std::string out;
  for (const auto& [k, e] : q.entries()) {
    if (!out.empty()) out += ' ';
    out += format_mode(k, ctx);
    out += ':';
    out += std::to_string(e);
  }
  return out;
}

std::vector<std::string_view> split_bar(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '|') {
      parts.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

template <class S>
S parse_coefficient(std::string_view text) {
  auto nums = split_ws(text);
  if (nums.size() != 2) throw InputError("coefficient needs real and imaginary parts");
  try {
    return ScalarTraits<S>::parse(nums[0], nums[1]);
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
}

template <class F>
void for_each_line(std::string_view text, int first_line, F&& f) {
  int lineno = first_line;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    auto t = trim(line);
    if (!t.empty() && t.front() != '#') {
      try {
        f(t);
      } catch (const InputError& e) {
        throw InputError("line " + std::to_string(lineno) + ": " + e.what());
      } catch (const std::invalid_argument& e) {
        throw InputError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
    ++lineno;
  }
}

}  // namespace

std::string format_mode(ModeKey k, const TruncationContext& ctx) {
  if (ctx.index_set == IndexSet::finite) return std::to_string(k.j);
  return "(" + std::to_string(k.j) + (k.sigma > 0 ? ",+)" : ",-)");
}

ModeKey parse_mode(std::string_view text, const TruncationContext& ctx) {
  text = trim(text);
  ModeKey k;
  if (ctx.index_set == IndexSet::finite) {
    k = ModeKey::finite(parse_int(text));
  } else {
    if (text.size() < 5 || text.front() != '(' || text.back() != ')')
      throw InputError("bad lattice mode '" + std::string(text) + "'");
    auto inner = text.substr(1, text.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string_view::npos) throw InputError("bad lattice mode '" + std::string(text) + "'");
    auto sg = trim(inner.substr(comma + 1));
    if (sg != "+" && sg != "-") throw InputError("bad sign in mode '" + std::string(text) + "'");
    k = ModeKey{parse_int(inner.substr(0, comma)), sg == "+" ? 1 : -1};
  }
  if (!ctx.contains(k)) throw InputError("mode '" + std::string(text) + "' outside the cutoff");
  return k;
}

std::string format_index(const MultiIndex& q, const TruncationContext& ctx) {
  return format_index_impl(q, ctx);
}

std::string format_index(const SignedIndex& p, const TruncationContext& ctx) {
  return format_index_impl(p, ctx);
}

MultiIndex parse_index(std::string_view text, const TruncationContext& ctx) {
  return parse_index_impl<false>(text, ctx);
}

SignedIndex parse_signed_index(std::string_view text, const TruncationContext& ctx) {
  return parse_index_impl<true>(text, ctx);
}

template <class S>
std::string format_term(ModeKey k, const MultiIndex& q, const S& c, const TruncationContext& ctx) {
  return format_mode(k, ctx) + " | " + format_index(q, ctx) + " | " + ScalarTraits<S>::format(c);
}

template <class S>
std::string serialize(const VectorField<S>& X) {
  std::string out;
  for (const auto& [key, c] : X.terms()) {
    out += format_term(key.k, key.q, c, X.context());
    out += '\n';
  }
  return out;
}

template <class S>
std::string serialize(const ScalarSeries<S>& f) {
  std::string out;
  for (const auto& [q, c] : f.terms()) {
    out += format_index(q, f.context());
    out += " | ";
    out += ScalarTraits<S>::format(c);
    out += '\n';
  }
  return out;
}

template <class S>
void parse_terms_into(VectorField<S>& X, std::string_view text, int first_line) {
  const auto& ctx = X.context();
  for_each_line(text, first_line, [&](std::string_view line) {
    auto parts = split_bar(line);
    if (parts.size() != 3) throw InputError("expected 'k | q | re im'");
    ModeKey k = parse_mode(parts[0], ctx);
    MultiIndex q = parse_index(parts[1], ctx);
    S c = parse_coefficient<S>(parts[2]);
    X.add_term(k, q, c);
  });
}

template <class S>
VectorField<S> parse_vector_field(std::string_view text, const TruncationContext& ctx) {
  VectorField<S> X(ctx);
  parse_terms_into(X, text, 1);
  return X;
}

template <class S>
ScalarSeries<S> parse_scalar_series(std::string_view text, const TruncationContext& ctx) {
  ScalarSeries<S> f(ctx);
  for_each_line(text, 1, [&](std::string_view line) {
    auto parts = split_bar(line);
    if (parts.size() != 2) throw InputError("expected 'q | re im'");
    f.add_term(parse_index(parts[0], ctx), parse_coefficient<S>(parts[1]));
  });
  return f;
}

#define RNF_TEXTIO(S)                                                                          \
  template std::string format_term(ModeKey, const MultiIndex&, const S&,                      \
                                   const TruncationContext&);                                  \
  template std::string serialize(const VectorField<S>&);                                       \
  template std::string serialize(const ScalarSeries<S>&);                                      \
  template VectorField<S> parse_vector_field(std::string_view, const TruncationContext&);      \
  template ScalarSeries<S> parse_scalar_series(std::string_view, const TruncationContext&);    \
  template void parse_terms_into(VectorField<S>&, std::string_view, int);

RNF_TEXTIO(GaussianRational)
RNF_TEXTIO(Complex)

}  // namespace rnf
