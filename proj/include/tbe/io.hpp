#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tbe/problem.hpp"

namespace tbe {

/// Reads a WCSP text: header `name n maxdomain nfunctions UB`, the n domain
/// sizes, then per function `arity vars... default ntuples` followed by
/// ntuples lines `values... cost`. Costs at or above UB become Top.
///
/// A negative arity declares a shareable function; a later function with
/// negative ntuples -k-1 reuses the table of shareable function k.
/// Global cost functions are rejected. Throws ParseError with a line number.
Problem parse_wcsp(std::string_view text);
Problem read_wcsp_file(const std::string& path);

/// Inverse of parse_wcsp up to tuple order. The written UB is the declared
/// one when set, raised if needed so that it exceeds every finite cost sum of
/// per-function maxima. Each function's default is its most frequent cost.
std::string write_wcsp(const Problem& problem);

struct UaiModel {
  BeliefNetwork network;
  std::vector<std::string> warnings;
};

/// Reads a UAI BAYES model. The child of each CPT is the last scope variable;
/// tables are listed with the last scope variable changing fastest.
/// CPTs off normalization by more than `tolerance` produce a warning.
UaiModel parse_uai(std::string_view text, double tolerance = 1e-6);
UaiModel read_uai_file(const std::string& path);

/// Evidence text `count (var value)*` against `domains`.
Assignment parse_evidence(std::string_view text, std::span<const std::size_t> domains);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace tbe
