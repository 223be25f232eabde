#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace darklattice {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
// Units: wavelength, linewidth and hbar are all 1.
inline constexpr double kLambda0 = 1.0;
inline constexpr double kK0 = 2.0 * kPi / kLambda0;
inline constexpr double kGamma0 = 1.0;

enum class ErrorKind {
  invalid_input,
  domain,
  degenerate,
  instability,
  infeasible,
  consistency,
  truncated_transform,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// (1, i, 0)/sqrt(2)
CVec3 circular_dipole();

}  // namespace darklattice
