#pragma once

#include <cstddef>

#include "tbe/problem.hpp"
#include "tbe/solver.hpp"

namespace tbe {

inline constexpr std::size_t kBruteForceLimit = 100'000'000;

/// Exhaustive enumeration in lexicographic order (variable 0 most significant).
/// Returns the optimum and the lexicographically smallest optimal assignment.
/// Throws StateSpaceTooLargeError above `limit` complete assignments.
Solution brute_force(const Problem& problem, std::size_t limit = kBruteForceLimit);

}  // namespace tbe
