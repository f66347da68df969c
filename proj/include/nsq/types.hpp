#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nsq {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Kernels come in two flavours: a plain loop kept as the reference and an
// OpenMP version used by default. Both must agree bit-for-bit up to
// reduction order.
enum class Exec { serial, parallel };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AlignmentError : Error {
  using Error::Error;
};
struct ContractViolation : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct BranchError : Error {
  using Error::Error;
};
struct EvaluationError : Error {
  using Error::Error;
};
struct DegreeUndefined : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> hist)
      : Error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

}  // namespace nsq
