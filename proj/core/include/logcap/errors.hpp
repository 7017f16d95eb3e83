#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logcap {

// Base for recoverable model/numerics errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Two intervals overlap without being identical. The caller is expected to
// split measures into disjoint refinements first (see split_to_disjoint).
class PartialOverlapError : public Error {
 public:
  PartialOverlapError(std::size_t i, std::size_t j)
      : Error("partial overlap between atoms " + std::to_string(i) + " and " +
              std::to_string(j)),
        first(i),
        second(j) {}
  std::size_t first, second;
};

// Adaptive quadrature hit its node budget; carries the best estimate.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(double best, double err)
      : Error("quadrature node budget exceeded (best=" + std::to_string(best) +
              ", err=" + std::to_string(err) + ")"),
        best_estimate(best),
        error_estimate(err) {}
  double best_estimate, error_estimate;
};

// Coincident centers make a pair kernel singular.
class SingularPairError : public Error {
 public:
  SingularPairError(std::size_t i, std::size_t j)
      : Error("singular pair: coincident centers at indices " +
              std::to_string(i) + ", " + std::to_string(j)),
        first(i),
        second(j) {}
  std::size_t first, second;
};

// A level's intervals are expected to be pairwise disjoint but are not.
class DisjointnessError : public Error {
 public:
  DisjointnessError(long i, long j)
      : Error("intervals with indices " + std::to_string(i) + " and " +
              std::to_string(j) + " overlap"),
        first(i),
        second(j) {}
  long first, second;
};

// Level search ran out of admissible levels before meeting the energy budget.
class LevelExhaustionError : public Error {
 public:
  LevelExhaustionError(long level, double occupancy)
      : Error("level search exhausted at n=" + std::to_string(level) +
              " (best occupancy " + std::to_string(occupancy) + ")"),
        last_level(level),
        best_occupancy(occupancy) {}
  long last_level;
  double best_occupancy;
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what) : Error(what) {}
};

// Equilibrium linear system could not be factorized; refine the panels.
class SingularSystemError : public Error {
 public:
  explicit SingularSystemError(const std::string& what) : Error(what) {}
};

}  // namespace logcap
