#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "darklattice/core.hpp"
#include "darklattice/dynamics.hpp"
#include "darklattice/lattice.hpp"

namespace darklattice {

struct DetectionMode {
  double waist = 1.0;
  CVec3 polarization = circular_dipole();
  Vec2 center = Vec2::Zero();
};

struct PhotonRecord {
  std::vector<double> times;
  std::vector<double> n_of_t;
  std::vector<double> dndt;
  double eta = 0.0;
  std::vector<double> omega;
  std::vector<double> spectrum;  // |E|, unit peak
  std::vector<double> theta;
  std::vector<double> angular;   // |E|, unit peak
};

// Field of the dipole amplitudes at r, units where mu0 k0^2 |d| = 1.
CVec3 field_at_point(const Lattice& lattice, const RealSpaceState& state, const Vec3& r);

// Uniform grid [lo, hi) with the given step.
std::vector<double> frequency_grid(double lo = -15.0, double hi = 15.0, double step = 0.01);

// Throws truncated_transform unless the final norm is below 1e-4 of the initial one.
void require_decayed(const Trajectory& traj, double fraction = 1e-4);

// E(kappa, omega) = sum_j e_j(omega) exp(-i kappa.r_j), with e_j(omega) the trapezoid
// transform of exp(i omega t) e_j(t). Rows: directions; columns: frequencies. Not normalised.
CMatrix directional_spectra(const Lattice& lattice, const Trajectory& traj, const std::vector<Vec2>& kappas,
                            const std::vector<double>& omega_grid);

// Normalised so that max |E| = 1.
std::vector<cplx> spectrum_at_direction(const Lattice& lattice, const Trajectory& traj, const Vec2& kappa_par,
                                        const std::vector<double>& omega_grid);

enum class Plane { xz, yz };

struct AngularProfile {
  std::vector<double> theta;
  std::vector<double> magnitude;  // unit peak
  double omega = 0.0;             // frequency used
};

// Without omega, uses the frequency maximising sum_theta |E(theta, omega)|^2 on the default grid.
AngularProfile angular_profile(const Lattice& lattice, const Trajectory& traj, Plane plane,
                               const std::vector<double>& theta_grid, std::optional<double> omega = {});

// Gaussian detection-mode population n(t), counting both sides of the array.
PhotonRecord mode_overlap(const Lattice& lattice, const Trajectory& traj, const DetectionMode& mode);

void write_photon_csv(std::ostream& os, const PhotonRecord& rec, const std::string& comment = {});
void write_spectrum_csv(std::ostream& os, const std::vector<double>& omega, const std::vector<double>& abs_e,
                        const std::string& comment = {});
void write_angular_csv(std::ostream& os, const std::vector<double>& theta, const std::vector<double>& abs_e,
                       const std::string& comment = {});

}  // namespace darklattice
