#include "darklattice/emission.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "darklattice/greens.hpp"
#include "darklattice/io.hpp"

namespace darklattice {

CVec3 field_at_point(const Lattice& lattice, const RealSpaceState& state, const Vec3& r) {
  if (state.e.size() != lattice.size()) fail(ErrorKind::invalid_input, "state size does not match lattice");
  CVec3 E = CVec3::Zero();
  for (int j = 0; j < lattice.size(); ++j) {
    const Vec3 d = lattice.position(j) - r;
    if (d.norm() < 1e-12) fail(ErrorKind::domain, "field evaluated on an atom");
    if (state.e[j] == cplx(0.0, 0.0)) continue;
    E += green_tensor(d) * lattice.dipole() * state.e[j];
  }
  return E;
}

std::vector<double> frequency_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) fail(ErrorKind::invalid_input, "invalid frequency grid");
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) out[i] = lo + i * step;
  return out;
}

void require_decayed(const Trajectory& traj, double fraction) {
  if (traj.count() < 2) fail(ErrorKind::truncated_transform, "trajectory has fewer than two samples");
  const double n0 = traj.norm_at(0);
  const double n1 = traj.norm_at(traj.count() - 1);
  if (!(n1 < fraction * n0)) {
    std::ostringstream os;
    os << "trajectory not decayed: final norm " << n1 << " vs initial " << n0 << " (need < " << fraction
       << " of initial)";
    fail(ErrorKind::truncated_transform, os.str());
  }
}

namespace {

std::vector<double> trapezoid_weights(const Trajectory& traj) {
  const std::size_t n = traj.count();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = traj.times[i + 1] - traj.times[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

CMatrix directional_spectra(const Lattice& lattice, const Trajectory& traj, const std::vector<Vec2>& kappas,
                            const std::vector<double>& omega_grid) {
  if (traj.dim() != lattice.size()) fail(ErrorKind::invalid_input, "trajectory does not match lattice");
  const auto K = static_cast<Eigen::Index>(kappas.size());
  const auto N = static_cast<Eigen::Index>(lattice.size());
  const auto T = static_cast<Eigen::Index>(traj.count());
  const auto W = static_cast<Eigen::Index>(omega_grid.size());
  CMatrix F(K, N);
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index j = 0; j < N; ++j) {
      const Vec3& r = lattice.position(static_cast<int>(j));
      const double ph = -(kappas[a].x() * r.x() + kappas[a].y() * r.y());
      F(a, j) = cplx(std::cos(ph), std::sin(ph));
    }
  const CMatrix S = F * traj.as_matrix();  // K x T projected amplitudes
  const auto w = trapezoid_weights(traj);
  CMatrix out(K, W);
  constexpr Eigen::Index block = 256;
  for (Eigen::Index w0 = 0; w0 < W; w0 += block) {
    const Eigen::Index nb = std::min(block, W - w0);
    CMatrix L(T, nb);
    for (Eigen::Index c = 0; c < nb; ++c) {
      const double om = omega_grid[w0 + c];
      for (Eigen::Index t = 0; t < T; ++t) {
        const double ph = om * traj.times[t];
        L(t, c) = w[t] * cplx(std::cos(ph), std::sin(ph));
      }
    }
    out.middleCols(w0, nb).noalias() = S * L;
  }
  return out;
}

std::vector<cplx> spectrum_at_direction(const Lattice& lattice, const Trajectory& traj, const Vec2& kappa_par,
                                        const std::vector<double>& omega_grid) {
  require_decayed(traj);
  const CMatrix E = directional_spectra(lattice, traj, {kappa_par}, omega_grid);
  const double peak = E.cwiseAbs().maxCoeff();
  std::vector<cplx> out(omega_grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = peak > 0 ? E(0, static_cast<Eigen::Index>(i)) / peak : 0.0;
  return out;
}

AngularProfile angular_profile(const Lattice& lattice, const Trajectory& traj, Plane plane,
                               const std::vector<double>& theta_grid, std::optional<double> omega) {
  require_decayed(traj);
  std::vector<Vec2> kappas;
  for (double th : theta_grid) {
    const double k = kK0 * std::sin(th);
    kappas.push_back(plane == Plane::xz ? Vec2(k, 0.0) : Vec2(0.0, k));
  }
  AngularProfile prof;
  prof.theta = theta_grid;
  if (!omega) {
    auto best_on = [&](const std::vector<double>& grid) {
      const CMatrix E = directional_spectra(lattice, traj, kappas, grid);
      const RVector power = E.cwiseAbs2().colwise().sum();
      Eigen::Index i = 0;
      power.maxCoeff(&i);
      return grid[i];
    };
    const double coarse = best_on(frequency_grid(-15.0, 15.0, 0.05));
    omega = best_on(frequency_grid(coarse - 0.05, coarse + 0.05 + 1e-9, 0.005));
  }
  prof.omega = *omega;
  const CMatrix E = directional_spectra(lattice, traj, kappas, {*omega});
  const double peak = E.cwiseAbs().maxCoeff();
  prof.magnitude.resize(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i)
    prof.magnitude[i] = peak > 0 ? std::abs(E(static_cast<Eigen::Index>(i), 0)) / peak : 0.0;
  return prof;
}

PhotonRecord mode_overlap(const Lattice& lattice, const Trajectory& traj, const DetectionMode& mode) {
  if (!(mode.waist > 0.0)) fail(ErrorKind::invalid_input, "detection waist must be positive");
  if (traj.count() > 0 && traj.dim() != lattice.size())
    fail(ErrorKind::invalid_input, "trajectory does not match lattice");
  const int n = lattice.size();
  const cplx pol = mode.polarization.dot(lattice.dipole());  // d . conj(eps)
  CVector weights(n);
  for (int j = 0; j < n; ++j) {
    const Vec3& r = lattice.position(j);
    const double dx = r.x() - mode.center.x();
    const double dy = r.y() - mode.center.y();
    weights[j] = pol * std::exp(-(dx * dx + dy * dy) / (mode.waist * mode.waist));
  }
  const double pref = 2.0 * 3.0 / (4.0 * kPi * kPi * mode.waist * mode.waist);
  PhotonRecord rec;
  rec.times = traj.times;
  rec.dndt.resize(traj.count());
  rec.n_of_t.resize(traj.count());
  for (std::size_t i = 0; i < traj.count(); ++i) {
    const cplx a = weights.cwiseProduct(traj.states[i]).sum();
    rec.dndt[i] = pref * std::norm(a);
    rec.n_of_t[i] = i == 0 ? 0.0
                           : rec.n_of_t[i - 1] + 0.5 * (traj.times[i] - traj.times[i - 1]) *
                                                     (rec.dndt[i] + rec.dndt[i - 1]);
  }
  rec.eta = rec.n_of_t.empty() ? 0.0 : rec.n_of_t.back();
  return rec;
}

void write_photon_csv(std::ostream& os, const PhotonRecord& rec, const std::string& comment) {
  CsvWriter w(os, {"t", "n", "dndt"}, comment);
  for (std::size_t i = 0; i < rec.times.size(); ++i) w.row({rec.times[i], rec.n_of_t[i], rec.dndt[i]});
}

void write_spectrum_csv(std::ostream& os, const std::vector<double>& omega, const std::vector<double>& abs_e,
                        const std::string& comment) {
  CsvWriter w(os, {"omega", "abs_E"}, comment);
  for (std::size_t i = 0; i < omega.size(); ++i) w.row({omega[i], abs_e[i]});
}

void write_angular_csv(std::ostream& os, const std::vector<double>& theta, const std::vector<double>& abs_e,
                       const std::string& comment) {
  CsvWriter w(os, {"theta", "abs_E"}, comment);
  for (std::size_t i = 0; i < theta.size(); ++i) w.row({theta[i], abs_e[i]});
}

}  // namespace darklattice
