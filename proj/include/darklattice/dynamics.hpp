#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "darklattice/core.hpp"
#include "darklattice/greens.hpp"
#include "darklattice/lattice.hpp"
#include "darklattice/pattern.hpp"

namespace darklattice {

struct RealSpaceState {
  CVector e;
  cplx g{1.0, 0.0};
  double norm() const { return e.squaredNorm(); }
};

struct GaussianDrive {
  double waist = 1.0;
  double amplitude = 1e-3;
  CVec3 polarization = circular_dipole();
  Vec2 k_offset = Vec2::Zero();
  Envelope envelope;  // empty: constant 1

  // Omega_j = amplitude (conj(dipole).pol) exp(-r^2/waist^2) exp(i k.r)
  CVector site_rates(const Lattice& lattice) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<cplx> g;
  double dt = 0.0;      // integrator step
  double sample = 0.0;  // spacing of stored snapshots
  std::string description;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
  std::size_t count() const { return states.size(); }
  double norm_at(std::size_t i) const { return states[i].squaredNorm(); }
  // Snapshots as columns.
  CMatrix as_matrix() const;
};

struct EvolveOptions {
  int record_every = 1;
  // Stop at the first recorded snapshot with norm below this (0 disables).
  double stop_norm = 0.0;
  // Keep g = 1 instead of integrating it (weak drive).
  bool weak_drive = false;
  double t0 = 0.0;
  // Only the last state is kept when false.
  bool keep_history = true;
};

Trajectory evolve_real_space(const Lattice& lattice, const CouplingMatrix& coupling,
                             const std::vector<DetuningPattern>& patterns,
                             const std::optional<GaussianDrive>& drive, const RealSpaceState& state0,
                             double t_end, double dt, const EvolveOptions& options = {});

struct Level {
  std::string label;
  double J = 0.0;
  double Gamma = 0.0;
};

struct FewLevelModel {
  std::vector<Level> levels;
  CMatrix couplings;  // Hermitian
  Envelope envelope;  // empty: constant 1
  // Optional constant source term (weak drive), added as +i*source.
  CVector source;

  void validate() const;
};

Trajectory evolve_few_level(const FewLevelModel& model, const CVector& v0, double t_end, double dt,
                            int record_every = 1);

// Levels at the given quasimomenta (wrapped into the zone) coupled by the pattern's
// Fourier components: C_ab = sum_Q Delta_Q [k_a - Q = k_b mod reciprocal lattice].
FewLevelModel momentum_model(const DetuningPattern& pattern, const std::vector<Vec2>& ks,
                             const std::vector<std::string>& labels, double spacing,
                             const CVec3& dipole, double truncation_radius);

cplx steady_dark_amplitude(double Delta, double J_r, double Gamma_r, double J_d, double Omega_r);

struct StoreOptions {
  // Pattern used while driving; default checkerboard with amplitude Delta_store.
  std::optional<PatternKind> pattern;
  Vec2 center = Vec2::Zero();
};

RealSpaceState prepare_stored_state(const Lattice& lattice, const CouplingMatrix& coupling, double waist,
                                    double Delta_store, double drive_strength,
                                    const StoreOptions& options = {});

// Finite-lattice DFT populations |FFT2(e)/sqrt(N)|^2 on the full grid (holes count as 0),
// indexed [ix * ny + iy] with k = 2 pi (ix/nx, iy/ny)/d.
std::vector<double> momentum_populations(const Lattice& lattice, const CVector& e);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& comment = {});
// Header: magic "DLTRAJ1\0", int64 dim, double dt, int64 count; then per snapshot
// double t followed by dim complex<double>.
void write_trajectory_binary(std::ostream& os, const Trajectory& traj);

}  // namespace darklattice
