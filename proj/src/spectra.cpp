#include <algorithm>
#include <cmath>
#include <numeric>

#include "darklattice/protocols.hpp"

namespace darklattice {

namespace {

// Peaks from poles p with residues r of sum_i r_i / (w - p_i).
std::vector<SpectralPeak> peaks_from_poles(const std::vector<cplx>& poles, const std::vector<cplx>& residues) {
  std::vector<SpectralPeak> out(poles.size());
  double total = 0.0;
  std::vector<double> area(poles.size(), 0.0);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    out[i].center = poles[i].real();
    out[i].width = std::abs(2.0 * poles[i].imag());
    const double r2 = std::norm(residues[i]);
    if (r2 > 0.0) area[i] = kPi * r2 / std::max(0.5 * out[i].width, 1e-300);
    total += area[i];
  }
  for (std::size_t i = 0; i < poles.size(); ++i) out[i].weight = total > 0.0 ? area[i] / total : 0.0;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
  return out;
}

}  // namespace

TwoColorSpectrum two_color_spectrum(double Delta, double J_d, double J_r, double Gamma_r,
                                    const std::vector<double>& omega) {
  if (!(Gamma_r > 0.0)) fail(ErrorKind::invalid_input, "Gamma_r must be positive");
  const cplx I(0.0, 1.0);
  const cplx mid = 0.5 * (J_d + J_r - 0.5 * I * Gamma_r);
  const cplx G = 0.5 * (J_d - J_r + 0.5 * I * Gamma_r);
  const cplx sq = std::sqrt(Delta * Delta + G * G);
  const cplx lp = mid - sq;
  const cplx lm = mid + sq;

  TwoColorSpectrum out;
  out.E.resize(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out.E[i] = Delta / ((omega[i] - lp) * (omega[i] - lm));
  out.separation = std::abs(2.0 * sq.real());
  if (Delta == 0.0) {
    // Decoupled: only the radiating line carries weight.
    const cplx rad(J_r, -0.5 * Gamma_r);
    out.peaks = {SpectralPeak{J_d, 0.0, 0.0}, SpectralPeak{rad.real(), Gamma_r, 1.0}};
    std::sort(out.peaks.begin(), out.peaks.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
    return out;
  }
  const cplx res = Delta / (lp - lm);
  out.peaks = peaks_from_poles({lp, lm}, {res, -res});
  return out;
}

std::vector<SpectralPeak> fit_two_poles(const std::vector<double>& omega, const std::vector<cplx>& E,
                                        double threshold) {
  if (omega.size() != E.size()) fail(ErrorKind::invalid_input, "spectrum and grid sizes differ");
  double peak = 0.0;
  for (const auto& e : E) peak = std::max(peak, std::abs(e));
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < E.size(); ++i)
    if (std::abs(E[i]) > threshold * peak) use.push_back(i);
  if (use.size() < 4) fail(ErrorKind::degenerate, "too few spectrum points for a two-pole fit");

  // E w^2 = s E w - q E + c1 w + c0
  CMatrix A(static_cast<Eigen::Index>(use.size()), 4);
  CVector rhs(static_cast<Eigen::Index>(use.size()));
  for (std::size_t r = 0; r < use.size(); ++r) {
    const double w = omega[use[r]];
    const cplx e = E[use[r]];
    const auto row = static_cast<Eigen::Index>(r);
    A(row, 0) = e * w;
    A(row, 1) = -e;
    A(row, 2) = w;
    A(row, 3) = 1.0;
    rhs[row] = e * w * w;
  }
  const CVector sol = A.colPivHouseholderQr().solve(rhs);
  const cplx s = sol[0], q = sol[1], c1 = sol[2], c0 = sol[3];
  const cplx disc = std::sqrt(s * s - 4.0 * q);
  const cplx p1 = 0.5 * (s + disc);
  const cplx p2 = 0.5 * (s - disc);
  if (std::abs(p1 - p2) < 1e-14) fail(ErrorKind::degenerate, "two-pole fit collapsed to a double pole");
  const cplx r1 = (c1 * p1 + c0) / (p1 - p2);
  const cplx r2 = (c1 * p2 + c0) / (p2 - p1);
  return peaks_from_poles({p1, p2}, {r1, r2});
}

double bessel_j(int n, double x) {
  const int m = std::abs(n);
  double v = std::cyl_bessel_j(static_cast<double>(m), std::abs(x));
  const bool odd = (m % 2) != 0;
  if (odd && n < 0) v = -v;
  if (odd && x < 0.0) v = -v;
  return v;
}

SidebandSpectrum sideband_spectrum(double Delta, double J_d, double J_r, double Gamma_r, double delta_mod,
                                   double Omega_mod, const std::vector<double>& omega, double coverage) {
  if (!(Omega_mod > 0.0)) fail(ErrorKind::invalid_input, "modulation frequency must be positive");
  if (!(coverage > 0.0) || !(coverage < 1.0)) fail(ErrorKind::invalid_input, "coverage must lie in (0, 1)");
  const double x = delta_mod / Omega_mod;
  SidebandSpectrum out;
  int nmax = 0;
  double sum = std::pow(bessel_j(0, x), 2);
  while (sum < coverage && nmax < 1000) {
    ++nmax;
    sum += 2.0 * std::pow(bessel_j(nmax, x), 2);
  }
  out.truncation = 1.0 - sum;
  out.E.assign(omega.size(), 0.0);
  std::vector<double> shifted(omega.size());
  for (int n = -nmax; n <= nmax; ++n) {
    const double a = bessel_j(n, x);
    out.orders.push_back(n);
    out.weights.push_back(a * a);
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < omega.size(); ++i) shifted[i] = omega[i] + n * Omega_mod;
    const auto base = two_color_spectrum(Delta, J_d, J_r, Gamma_r, shifted);
    for (std::size_t i = 0; i < omega.size(); ++i) out.E[i] += a * base.E[i];
  }
  return out;
}

namespace {

Trajectory release_from_M(const Lattice& lattice, const CouplingMatrix& coupling,
                          const std::vector<DetuningPattern>& patterns, double waist, const SpectrumOptions& opt) {
  if (!(opt.settle >= 0.0)) fail(ErrorKind::invalid_input, "settle time must be >= 0");
  RealSpaceState s0 = prepare_stored_state(lattice, coupling, waist, opt.Delta_store, 1e-3);
  if (opt.settle > 0.0) {
    // Pattern off: the radiating admixture of the driven state leaves, the dark packet stays.
    const Trajectory idle =
        evolve_real_space(lattice, coupling, {}, std::nullopt, s0, opt.settle, opt.dt, {.keep_history = false});
    s0.e = idle.states.back();
  }
  EvolveOptions ev;
  ev.record_every = opt.record_every;
  ev.stop_norm = opt.stop_norm;
  return evolve_real_space(lattice, coupling, patterns, std::nullopt, s0, opt.t_max, opt.dt, ev);
}

}  // namespace

FiniteSpectrum finite_two_color(const Lattice& lattice, const CouplingMatrix& coupling, double Delta, double waist,
                                const std::vector<double>& omega, const SpectrumOptions& opt) {
  const auto traj =
      release_from_M(lattice, coupling, {preset_pattern(PatternKind::checkerboard, {cplx(Delta, 0.0)})}, waist, opt);
  FiniteSpectrum out;
  out.omega = omega;
  out.E = spectrum_at_direction(lattice, traj, Vec2::Zero(), omega);
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.E.size(); ++i)
    if (std::abs(out.E[i]) > std::abs(out.E[best])) best = i;
  out.predominant = omega.empty() ? 0.0 : omega[best];
  out.fitted = fit_two_poles(omega, out.E);
  return out;
}

SidebandMeasurement finite_sidebands(const Lattice& lattice, const CouplingMatrix& coupling, double Delta,
                                     double delta_mod, double Omega_mod, double waist, int max_order,
                                     const SpectrumOptions& opt) {
  if (!(Omega_mod > 0.0)) fail(ErrorKind::invalid_input, "modulation frequency must be positive");
  if (max_order < 0) fail(ErrorKind::invalid_input, "max_order must be >= 0");
  const double reach = (max_order + 1.5) * Omega_mod + 10.0;
  SidebandMeasurement out;
  out.omega = frequency_grid(-reach, reach, 0.01);

  const DetuningPattern cb = preset_pattern(PatternKind::checkerboard, {cplx(Delta, 0.0)});
  const auto plain = release_from_M(lattice, coupling, {cb}, waist, opt);
  const auto E0 = directional_spectra(lattice, plain, {Vec2::Zero()}, out.omega);
  require_decayed(plain);
  Eigen::Index ic = 0;
  E0.row(0).cwiseAbs().maxCoeff(&ic);
  out.center = out.omega[static_cast<std::size_t>(ic)];

  const DetuningPattern mod = preset_pattern(PatternKind::uniform, {cplx(delta_mod, 0.0)})
                                  .with_envelope([Omega_mod](double t) { return std::cos(Omega_mod * t); });
  const auto traj = release_from_M(lattice, coupling, {cb, mod}, waist, opt);
  const auto E = spectrum_at_direction(lattice, traj, Vec2::Zero(), out.omega);
  out.abs_E.resize(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) out.abs_E[i] = std::abs(E[i]);

  const double x = delta_mod / Omega_mod;
  double msum = 0.0, esum = 0.0;
  for (int n = -max_order; n <= max_order; ++n) {
    const double c = out.center - n * Omega_mod;
    double p = 0.0;
    for (std::size_t i = 0; i < E.size(); ++i)
      if (std::abs(out.omega[i] - c) < 0.5 * Omega_mod) p += out.abs_E[i] * out.abs_E[i];
    out.orders.push_back(n);
    out.measured.push_back(p);
    out.expected.push_back(std::pow(bessel_j(n, x), 2));
    msum += p;
    esum += out.expected.back();
  }
  for (auto& m : out.measured) m /= msum;
  for (auto& e : out.expected) e /= esum;
  return out;
}

}  // namespace darklattice
