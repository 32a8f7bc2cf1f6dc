#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gfproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Invalid user-supplied parameter (probability outside [0,1], negative rank, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file or dimension mismatch between loaded objects.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear algebra breakdown: failed SVD, singular system, NaN iterates.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateBasisError : public NumericalError {
 public:
  DegenerateBasisError(const std::string& what, Index numerical_rank)
      : NumericalError(what), numerical_rank_(numerical_rank) {}
  Index numerical_rank() const { return numerical_rank_; }

 private:
  Index numerical_rank_;
};

// A filter fit whose requirements cannot be met by any polynomial of the shift.
class FilterInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input too large for exhaustive enumeration.
class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gfproj
