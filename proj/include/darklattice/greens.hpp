#pragma once

#include <cstddef>

#include "darklattice/core.hpp"
#include "darklattice/lattice.hpp"

namespace darklattice {

using GreensTensor = Eigen::Matrix3cd;

// Free-space dyadic Green's tensor without the contact term; r != 0.
GreensTensor green_tensor(const Vec3& r, double k0 = kK0);

struct PairCoupling {
  double J = 0.0;
  double Gamma = 0.0;
  cplx value() const { return {J, -0.5 * Gamma}; }
};

PairCoupling pair_coupling(const Vec3& ri, const Vec3& rj, const CVec3& dipole, double k0 = kK0);

// J - i Gamma/2 for separation r, without the tensor round trip.
cplx coupling_value(const Vec3& r, const CVec3& dipole, double k0 = kK0);

class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(CMatrix m);

  const CMatrix& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  Eigen::MatrixXd J() const { return m_.real(); }
  Eigen::MatrixXd Gamma() const { return -2.0 * m_.imag(); }
  // Largest collective decay rate (exact up to 2000 atoms, power iteration beyond).
  double gamma_max() const { return gamma_max_; }

 private:
  CMatrix m_;
  double gamma_max_ = 0.0;
};

CouplingMatrix coupling_matrix(const Lattice& lattice);

struct Dispersion {
  Vec2 k = Vec2::Zero();
  double J = 0.0;
  double Gamma = 0.0;
};

inline double default_truncation_radius(double spacing) { return 150.0 * spacing; }

// Smooth cutoff applied to lattice sums: 1 below s = 1/2, C-infinity step to 0 at s = 1.
double taper_weight(double s);

bool in_first_zone(const Vec2& k, double spacing, double tol = 1e-9);
Vec2 wrap_to_zone(const Vec2& k, double spacing);

Dispersion dispersion(const Vec2& k, double spacing, const CVec3& dipole, double truncation_radius);
inline Dispersion dispersion(const Vec2& k, double spacing, const CVec3& dipole) {
  return dispersion(k, spacing, dipole, default_truncation_radius(spacing));
}

std::size_t dispersion_cache_size();
void clear_dispersion_cache();

}  // namespace darklattice
