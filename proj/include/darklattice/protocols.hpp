#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darklattice/core.hpp"
#include "darklattice/dynamics.hpp"
#include "darklattice/emission.hpp"
#include "darklattice/greens.hpp"
#include "darklattice/lattice.hpp"
#include "darklattice/pattern.hpp"

namespace darklattice {

// ---------------------------------------------------------------- retrieval

struct RetrievalOptions {
  double Delta_store = 5.0;
  double drive = 1e-3;
  double dt = 0.01;
  double stop_norm = 1e-6;
  double t_max = 5000.0;
  int record_every = 1;
};

struct RetrievalResult {
  double waist = 0.0;
  double eta = 0.0;
  double epsilon = 1.0;
  PhotonRecord record;
};

RetrievalResult retrieval_experiment(const Lattice& lattice, const CouplingMatrix& coupling, double waist,
                                     double Delta_retrieve = 2.0, double t_storage = 0.0,
                                     const RetrievalOptions& options = {});
RetrievalResult retrieval_experiment(const Lattice& lattice, double waist, double Delta_retrieve = 2.0,
                                     double t_storage = 0.0, const RetrievalOptions& options = {});

std::vector<RetrievalResult> waist_sweep(const Lattice& lattice, const CouplingMatrix& coupling,
                                         const std::vector<double>& waists, double Delta_retrieve,
                                         double t_storage, const RetrievalOptions& options = {});

struct WaistSearch {
  double waist = 0.0;
  double epsilon = 1.0;
  std::vector<std::pair<double, double>> evaluations;  // (waist, epsilon)
};

// Golden-section search over waist/d in [lo, hi] (hi <= 0 means N/2).
WaistSearch optimal_waist(const Lattice& lattice, const CouplingMatrix& coupling, double Delta_retrieve,
                          double t_storage, const RetrievalOptions& options = {}, double lo = 2.0,
                          double hi = 0.0, double rel_tol = 1e-2);

// ------------------------------------------------------------ pulse shaping

enum class WindowKind { blackman, tukey, triangular, sine };

WindowKind parse_window_kind(const std::string& name);
std::string to_string(WindowKind kind);

struct WindowShape {
  WindowKind kind = WindowKind::blackman;
  double t_end = 10.0;
  double total = 1.0;
  double taper = 0.5;  // tukey only

  // Normalised target dn/dt; zero outside [0, t_end].
  double value(double t) const;
  std::vector<double> sample(const std::vector<double>& times) const;
};

WindowShape window_shape(WindowKind kind, double t_end, double total, double taper = 0.5);

struct DetuningSequence {
  std::vector<double> times;
  std::vector<double> values;
  double plateau_level = 0.5;
  double cap = 20.0;
  std::optional<double> plateau_start;

  // Linear interpolation; the last value holds beyond the grid.
  double value_at(double t) const;
};

struct SolverOptions {
  double dt = 1e-3;
  double plateau = 0.5;
  double cap = 20.0;
};

// Inverts the three-level model dv_d = -iJ v_d + i Delta v_r, dv_r = i Delta v_d - Gamma_r/2 v_r
// (Euler steps) so that Gamma_r |v_r|^2 follows the target.
DetuningSequence solve_detuning_sequence(const WindowShape& target, double Gamma_r, double J,
                                         const SolverOptions& options = {});

struct ShapingOptions {
  double Delta_store = 20.0;
  double dt = 0.005;
  double tail = 5.0;  // simulated time after t_end
  SolverOptions solver;
};

struct ShapingResult {
  DetuningSequence sequence;
  std::vector<double> times;
  std::vector<double> target;
  std::vector<double> achieved;
  double compare_until = 0.0;
  double l2_error = 0.0;  // relative, t <= compare_until
  double l1_error = 0.0;
  double eta = 0.0;
  double Gamma_r = 0.0;
  double J = 0.0;
};

// Stored checkerboard state of the given waist released by the solved Delta(t).
ShapingResult shaping_experiment(const Lattice& lattice, const CouplingMatrix& coupling, const WindowShape& target,
                                 double waist, const ShapingOptions& options = {});

// -------------------------------------------------------- frequency control

struct SpectralPeak {
  double center = 0.0;
  double width = 0.0;   // FWHM of |E|^2
  double weight = 0.0;  // share of integrated |E|^2
};

struct TwoColorSpectrum {
  std::vector<cplx> E;
  std::vector<SpectralPeak> peaks;  // sorted by centre
  double separation = 0.0;
};

// E(w) = Delta / ((w - l+)(w - l-)) with poles l = (J_d + J_r - i Gamma_r/2)/2 -/+ sqrt(Delta^2 + G^2).
TwoColorSpectrum two_color_spectrum(double Delta, double J_d, double J_r, double Gamma_r,
                                    const std::vector<double>& omega);

// Two-pole rational least-squares fit of a sampled spectrum; uses points with |E| above
// threshold * max. Peaks sorted by centre; weights from the fitted residues.
std::vector<SpectralPeak> fit_two_poles(const std::vector<double>& omega, const std::vector<cplx>& E,
                                        double threshold = 0.02);

double bessel_j(int n, double x);

struct SidebandSpectrum {
  std::vector<cplx> E;
  std::vector<int> orders;
  std::vector<double> weights;  // J_n(delta/Omega)^2
  double truncation = 0.0;      // 1 - sum of weights
};

SidebandSpectrum sideband_spectrum(double Delta, double J_d, double J_r, double Gamma_r, double delta_mod,
                                   double Omega_mod, const std::vector<double>& omega, double coverage = 0.999);

struct SpectrumOptions {
  double Delta_store = 5.0;
  double settle = 10.0;  // free evolution between storage and release
  double dt = 0.01;
  double stop_norm = 1e-6;
  double t_max = 5000.0;
  int record_every = 1;
};

struct FiniteSpectrum {
  std::vector<double> omega;
  std::vector<cplx> E;  // unit peak
  std::vector<SpectralPeak> fitted;
  double predominant = 0.0;  // omega at max |E|
};

// Stored M-point state released by a static checkerboard, observed along kappa = 0.
FiniteSpectrum finite_two_color(const Lattice& lattice, const CouplingMatrix& coupling, double Delta,
                                double waist, const std::vector<double>& omega, const SpectrumOptions& options = {});

struct SidebandMeasurement {
  std::vector<double> omega;
  std::vector<double> abs_E;  // unit peak
  double center = 0.0;        // unmodulated main peak
  std::vector<int> orders;
  std::vector<double> measured;  // normalised over the listed orders
  std::vector<double> expected;  // J_n^2 normalised over the same orders
};

// Checkerboard Delta plus a uniform modulation delta cos(Omega t).
SidebandMeasurement finite_sidebands(const Lattice& lattice, const CouplingMatrix& coupling, double Delta,
                                     double delta_mod, double Omega_mod, double waist, int max_order = 3,
                                     const SpectrumOptions& options = {});

// ---------------------------------------------------------------- steering

enum class SteeringSymmetry { symmetric, asymmetric, perpendicular_suppressed, fully_asymmetric };
std::string to_string(SteeringSymmetry s);

struct SteeringReport {
  int period = 0;
  std::vector<Vec2> coupled;              // momenta coupled to the stored X state
  std::vector<bool> inside_light_cone;
  std::vector<double> sin_theta;          // predicted emission angles (radiating states)
  SteeringSymmetry symmetry = SteeringSymmetry::symmetric;
};

SteeringReport classify_steering(const DetuningPattern& pattern, double spacing);

struct SteeringOptions {
  double Delta_store = 5.0;
  double dt = 0.01;
  double stop_norm = 1e-5;
  double t_max = 2000.0;
  int record_every = 2;
  int theta_points = 721;
};

struct SteeringResult {
  SteeringReport report;
  AngularProfile profile;
};

// Stores at X with the stripe pattern and releases with the given pattern.
SteeringResult steering_experiment(const Lattice& lattice, const CouplingMatrix& coupling,
                                   const DetuningPattern& pattern, double waist, const SteeringOptions& options = {});

// -------------------------------------------------------------------- Rabi

struct RabiPair {
  double J1 = 0.0;
  double J2 = 0.0;
  double Delta = 0.0;
  double omega_gen() const;
};

cplx rabi_pair_analytic(const RabiPair& pair, double t);

inline constexpr double kInfiniteQ = std::numeric_limits<double>::infinity();

using JAccessor = std::function<double(const Vec2&)>;

// Omega_gen(k) = sqrt(Delta^2 + ((J(k) - J(k + Q))/2)^2) with Q the coupling momentum.
double generalized_rabi(const Vec2& k, const Vec2& Q, double Delta, const JAccessor& J, double spacing);

// Returns kInfiniteQ when the frequency difference is below 1e-12.
double quality_factor(const Vec2& k, const Vec2& k_c, double Delta, double Phi_min, const JAccessor& J,
                      const Vec2& Q, double spacing);

// Containment radius of a Gaussian of waist rho: 99.8% of the 2D momentum weight.
double containment_radius(double waist, double fraction = 0.998);

// Minimum Q over the containment circle around X for the X-M coupling.
double quality_factor_for_waist(double spacing, double Delta, double waist, double Phi_min, const CVec3& dipole,
                                int directions = 64);

struct RabiRun {
  std::vector<double> times;
  std::vector<double> pop_a;  // near the stored momentum
  std::vector<double> pop_b;  // near the coupled momentum
  std::vector<double> norm;
  std::vector<std::size_t> maxima;  // indices of local maxima of pop_b
};

// Stores at X and couples to M with Delta (-1)^{n_y}.
RabiRun rabi_experiment(const Lattice& lattice, const CouplingMatrix& coupling, double Delta, double waist,
                        double t_end, double dt = 0.005, int record_every = 5, double Delta_store = 5.0);

// ------------------------------------------------------------------ cycles

struct CycleResult {
  std::vector<std::string> labels;
  std::vector<Vec2> momenta;
  std::vector<double> times;
  std::vector<std::vector<double>> populations;  // [state][time]
  std::vector<int> order;                        // state index of successive maxima
};

// Stores at X, applies the pattern and tracks DFT weight near each target momentum.
CycleResult cycle_experiment(const Lattice& lattice, const CouplingMatrix& coupling, const DetuningPattern& pattern,
                             const std::vector<Vec2>& momenta, const std::vector<std::string>& labels, double waist,
                             double t_end, double dt, int record_every = 5, double Delta_store = 5.0);

// ----------------------------------------------------------------- defects

struct DefectSet {
  std::string name;
  std::vector<Vec2> holes;  // units of d
};

// The one/three/seven/nine-hole sets used for the defect law.
std::vector<DefectSet> standard_defect_sets();

double defect_intensity_fraction(const Lattice& base, const std::vector<Vec2>& holes, double waist);

struct DefectPoint {
  std::string set;
  double waist = 0.0;
  double fraction = 0.0;
  double drop = 0.0;
  double eta = 0.0;
  double eta_reference = 0.0;
};

struct DefectSweep {
  std::vector<DefectPoint> points;
  double alpha = 0.0;
};

DefectSweep defect_sweep(const Lattice& base, const std::vector<DefectSet>& sets, const std::vector<double>& waists,
                         double Delta_retrieve = 2.0, const RetrievalOptions& options = {});

}  // namespace darklattice
