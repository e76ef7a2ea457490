#pragma once

#include <string>
#include <string_view>

#include "rnf/field.hpp"

namespace rnf {

// Canonical text form. Finite modes print as "i", lattice modes as "(j,+)" or
// "(j,-)". A multi-index is a space separated list of "mode:exp" pairs in mode
// order; the empty index prints as "0". Vector field lines read
//   k | q | re im
// and scalar series lines read
//   q | re im
// with exact coefficients written as n or n/d.

std::string format_mode(ModeKey k, const TruncationContext& ctx);
ModeKey parse_mode(std::string_view text, const TruncationContext& ctx);

std::string format_index(const MultiIndex& q, const TruncationContext& ctx);
std::string format_index(const SignedIndex& p, const TruncationContext& ctx);
MultiIndex parse_index(std::string_view text, const TruncationContext& ctx);
SignedIndex parse_signed_index(std::string_view text, const TruncationContext& ctx);

template <class S>
std::string format_term(ModeKey k, const MultiIndex& q, const S& c, const TruncationContext& ctx);

template <class S>
std::string serialize(const VectorField<S>& X);
template <class S>
std::string serialize(const ScalarSeries<S>& f);

/// Blank lines and lines starting with '#' are ignored. Errors carry the line number.
template <class S>
VectorField<S> parse_vector_field(std::string_view text, const TruncationContext& ctx);
template <class S>
ScalarSeries<S> parse_scalar_series(std::string_view text, const TruncationContext& ctx);

/// Adds the terms of text to X.
template <class S>
void parse_terms_into(VectorField<S>& X, std::string_view text, int first_line = 1);

}  // namespace rnf
