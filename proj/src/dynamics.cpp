#include "darklattice/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>

#include "darklattice/io.hpp"

namespace darklattice {

CVector GaussianDrive::site_rates(const Lattice& lattice) const {
  if (!(waist > 0.0)) fail(ErrorKind::invalid_input, "drive waist must be positive");
  const cplx overlap = lattice.dipole().dot(polarization);  // conj(d).pol
  CVector out(lattice.size());
  for (int j = 0; j < lattice.size(); ++j) {
    const Vec3& r = lattice.position(j);
    const double r2 = r.x() * r.x() + r.y() * r.y();
    const double ph = k_offset.x() * r.x() + k_offset.y() * r.y();
    out[j] = amplitude * overlap * std::exp(-r2 / (waist * waist)) * cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

CMatrix Trajectory::as_matrix() const {
  CMatrix m(dim(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = states[i];
  return m;
}

namespace {

long step_count(double span, double dt, int record_every) {
  if (!(dt > 0.0)) fail(ErrorKind::invalid_input, "dt must be positive");
  if (!(span >= 0.0)) fail(ErrorKind::invalid_input, "t_end must not precede the start time");
  if (record_every < 1) fail(ErrorKind::invalid_input, "record_every must be >= 1");
  long n = static_cast<long>(std::ceil(span / dt - 1e-9));
  n = std::max(n, 0L);
  // Whole sample intervals keep the stored grid uniform.
  return ((n + record_every - 1) / record_every) * record_every;
}

}  // namespace

Trajectory evolve_real_space(const Lattice& lattice, const CouplingMatrix& coupling,
                             const std::vector<DetuningPattern>& patterns,
                             const std::optional<GaussianDrive>& drive, const RealSpaceState& state0,
                             double t_end, double dt, const EvolveOptions& opt) {
  const int n = lattice.size();
  if (coupling.size() != n) fail(ErrorKind::invalid_input, "coupling matrix size does not match lattice");
  if (state0.e.size() != n) fail(ErrorKind::invalid_input, "initial state size does not match lattice");
  if (dt > 0.01 * (1.0 + 1e-12)) fail(ErrorKind::invalid_input, "dt must be <= 0.01/gamma0");
  const long steps = step_count(t_end - opt.t0, dt, opt.record_every);

  std::vector<RVector> values;
  std::vector<const DetuningPattern*> pats;
  for (const auto& p : patterns) {
    const auto v = p.site_values(lattice);
    values.push_back(Eigen::Map<const RVector>(v.data(), n));
    pats.push_back(&p);
  }
  CVector omega;
  if (drive) omega = drive->site_rates(lattice);
  const bool driven = drive.has_value();
  const double gamma_max = coupling.gamma_max();

  RVector delta(n);
  auto detuning_at = [&](double t) {
    delta.setZero();
    for (std::size_t p = 0; p < values.size(); ++p) delta += pats[p]->envelope(t) * values[p];
  };
  auto drive_at = [&](double t) { return driven && drive->envelope ? drive->envelope(t) : 1.0; };

  const CMatrix& M = coupling.matrix();
  const cplx I(0.0, 1.0);
  CVector Mx(n);
  auto rhs = [&](double t, const CVector& e, cplx g, CVector& de, cplx& dg) {
    detuning_at(t);
    Mx.noalias() = M * e;
    de = I * (delta.cast<cplx>().cwiseProduct(e) - Mx);
    dg = 0.0;
    if (driven) {
      const double s = drive_at(t);
      de += (I * s * g) * omega;
      if (!opt.weak_drive) dg = I * s * omega.dot(e);
    }
  };

  Trajectory tr;
  tr.dt = dt;
  tr.sample = dt * opt.record_every;
  std::ostringstream desc;
  desc << "real-space RK4, N=" << n << ", patterns=" << patterns.size() << (driven ? ", driven" : "");
  tr.description = desc.str();

  CVector e = state0.e;
  cplx g = state0.g;
  auto record = [&](double t) {
    if (!opt.keep_history) {
      tr.times.assign(1, t);
      tr.states.assign(1, e);
      tr.g.assign(1, g);
      return;
    }
    tr.times.push_back(t);
    tr.states.push_back(e);
    tr.g.push_back(g);
  };
  record(opt.t0);

  CVector k1(n), k2(n), k3(n), k4(n), tmp(n);
  cplx g1, g2, g3, g4;
  double norm = e.squaredNorm();
  for (long s = 1; s <= steps; ++s) {
    const double t = opt.t0 + (s - 1) * dt;
    detuning_at(t);
    const double dmax = n ? delta.cwiseAbs().maxCoeff() : 0.0;
    if (dt > 0.1 / std::max({dmax, gamma_max, 1e-300}) * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "dt = " << dt << " exceeds 0.1/max(|Delta|, Gamma_max) = "
         << 0.1 / std::max(dmax, gamma_max) << " at t = " << t;
      fail(ErrorKind::invalid_input, os.str());
    }
    rhs(t, e, g, k1, g1);
    tmp = e + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, tmp, g + 0.5 * dt * g1, k2, g2);
    tmp = e + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, tmp, g + 0.5 * dt * g2, k3, g3);
    tmp = e + dt * k3;
    rhs(t + dt, tmp, g + dt * g3, k4, g4);
    e += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g += (dt / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);

    const double next = e.squaredNorm();
    if (!std::isfinite(next)) fail(ErrorKind::instability, "non-finite amplitudes (step too large)");
    if (!driven && next > norm * (1.0 + 1e-6) && next > 1e-300) {
      std::ostringstream os;
      os << "norm grew from " << norm << " to " << next << " at t = " << t + dt << " (step too large)";
      fail(ErrorKind::instability, os.str());
    }
    norm = next;
    if (s % opt.record_every == 0) {
      record(opt.t0 + s * dt);
      if (opt.stop_norm > 0.0 && norm < opt.stop_norm) break;
    }
  }
  return tr;
}

void FewLevelModel::validate() const {
  const auto n = static_cast<Eigen::Index>(levels.size());
  if (couplings.rows() != n || couplings.cols() != n)
    fail(ErrorKind::invalid_input, "few-level coupling matrix size does not match levels");
  if ((couplings - couplings.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, couplings.cwiseAbs().maxCoeff()))
    fail(ErrorKind::invalid_input, "few-level coupling matrix is not Hermitian");
  for (const auto& l : levels)
    if (l.Gamma < 0.0) fail(ErrorKind::invalid_input, "level '" + l.label + "' has negative Gamma");
  if (source.size() != 0 && source.size() != n)
    fail(ErrorKind::invalid_input, "few-level source size does not match levels");
}

Trajectory evolve_few_level(const FewLevelModel& model, const CVector& v0, double t_end, double dt,
                            int record_every) {
  model.validate();
  const auto n = static_cast<Eigen::Index>(model.levels.size());
  if (v0.size() != n) fail(ErrorKind::invalid_input, "initial vector size does not match levels");
  const long steps = step_count(t_end, dt, record_every);
  CVector diag(n);
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag[i] = cplx(model.levels[i].J, -0.5 * model.levels[i].Gamma);
    scale = std::max(scale, model.levels[i].Gamma);
  }
  if (n) scale = std::max(scale, model.couplings.cwiseAbs().rowwise().sum().maxCoeff());
  if (dt > 0.01 * (1.0 + 1e-12) || dt > 0.1 / std::max(scale, 1e-300) * (1.0 + 1e-9))
    fail(ErrorKind::invalid_input, "dt too large for the few-level model");
  const bool has_source = model.source.size() == n && n > 0;
  const cplx I(0.0, 1.0);
  auto rhs = [&](double t, const CVector& v) -> CVector {
    const double env = model.envelope ? model.envelope(t) : 1.0;
    CVector out = -I * diag.cwiseProduct(v) + (I * env) * (model.couplings * v);
    if (has_source) out += I * model.source;
    return out;
  };
  Trajectory tr;
  tr.dt = dt;
  tr.sample = dt * record_every;
  tr.description = "few-level RK4, levels=" + std::to_string(n);
  CVector v = v0;
  tr.times.push_back(0.0);
  tr.states.push_back(v);
  double norm = v.squaredNorm();
  for (long s = 1; s <= steps; ++s) {
    const double t = (s - 1) * dt;
    const CVector k1 = rhs(t, v);
    const CVector k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
    const CVector k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
    const CVector k4 = rhs(t + dt, v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double next = v.squaredNorm();
    if (!std::isfinite(next)) fail(ErrorKind::instability, "non-finite amplitudes (step too large)");
    if (!has_source && next > norm * (1.0 + 1e-6) && next > 1e-300)
      fail(ErrorKind::instability, "few-level norm grew (step too large)");
    norm = next;
    if (s % record_every == 0) {
      tr.times.push_back(s * dt);
      tr.states.push_back(v);
    }
  }
  return tr;
}

FewLevelModel momentum_model(const DetuningPattern& pattern, const std::vector<Vec2>& ks,
                             const std::vector<std::string>& labels, double spacing,
                             const CVec3& dipole, double truncation_radius) {
  if (!labels.empty() && labels.size() != ks.size())
    fail(ErrorKind::invalid_input, "momentum_model: labels and momenta differ in length");
  FewLevelModel m;
  const auto n = static_cast<Eigen::Index>(ks.size());
  m.couplings = CMatrix::Zero(n, n);
  std::vector<Vec2> wrapped;
  for (std::size_t a = 0; a < ks.size(); ++a) {
    const Vec2 k = wrap_to_zone(ks[a], spacing);
    wrapped.push_back(k);
    const Dispersion d = dispersion(k, spacing, dipole, truncation_radius);
    m.levels.push_back({labels.empty() ? "k" + std::to_string(a) : labels[a], d.J, std::max(d.Gamma, 0.0)});
  }
  const double tol = 1e-9 / spacing;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (const auto& c : pattern.components()) {
        const Vec2 diff = wrap_to_zone(wrapped[a] - pattern.quasimomentum(c, spacing) - wrapped[b], spacing);
        // The zone edge is a single point modulo the reciprocal lattice.
        const double ex = std::min(std::abs(diff.x()), std::abs(std::abs(diff.x()) - 2.0 * kPi / spacing));
        const double ey = std::min(std::abs(diff.y()), std::abs(std::abs(diff.y()) - 2.0 * kPi / spacing));
        if (ex < tol && ey < tol) m.couplings(a, b) += c.amplitude;
      }
  if (pattern.has_envelope()) {
    DetuningPattern p = pattern;
    m.envelope = [p](double t) { return p.envelope(t); };
  }
  return m;
}

cplx steady_dark_amplitude(double Delta, double J_r, double Gamma_r, double J_d, double Omega_r) {
  const cplx denom = Delta * Delta - cplx(J_r, -0.5 * Gamma_r) * J_d;
  if (std::abs(denom) <= 1e-12) fail(ErrorKind::degenerate, "steady_dark_amplitude: resonant denominator");
  return -Delta * Omega_r / denom;
}

RealSpaceState prepare_stored_state(const Lattice& lattice, const CouplingMatrix& coupling, double waist,
                                    double Delta_store, double drive_strength, const StoreOptions& options) {
  const int n = lattice.size();
  if (coupling.size() != n) fail(ErrorKind::invalid_input, "coupling matrix size does not match lattice");
  if (!(waist > 0.0)) fail(ErrorKind::invalid_input, "storage waist must be positive");
  if (!(drive_strength > 0.0) || drive_strength > 1e-3 * (1.0 + 1e-12))
    fail(ErrorKind::invalid_input, "storage drive must satisfy 0 < Omega0 <= 1e-3 gamma0");
  const PatternKind kind = options.pattern.value_or(PatternKind::checkerboard);
  if (pattern_param_count(kind) != 1)
    fail(ErrorKind::invalid_input, "storage pattern must be a single-amplitude pattern");
  const DetuningPattern pattern = preset_pattern(kind, {cplx(Delta_store, 0.0)});
  const auto delta = pattern.site_values(lattice);

  CVector omega(n);
  for (int j = 0; j < n; ++j) {
    const Vec3& r = lattice.position(j);
    const double dx = r.x() - options.center.x();
    const double dy = r.y() - options.center.y();
    omega[j] = drive_strength * std::exp(-(dx * dx + dy * dy) / (waist * waist));
  }

  const cplx I(0.0, 1.0);
  CMatrix A = -I * coupling.matrix();
  for (int j = 0; j < n; ++j) A(j, j) += I * delta[j];
  Eigen::PartialPivLU<Eigen::Ref<CMatrix>> lu(A);
  if (!(lu.rcond() > 1e-14)) fail(ErrorKind::degenerate, "storage steady-state system is singular");
  CVector e = lu.solve(-I * omega);
  const double nrm = e.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) fail(ErrorKind::degenerate, "storage steady state vanished");
  RealSpaceState s;
  s.e = e / nrm;
  s.g = 1.0;
  return s;
}

std::vector<double> momentum_populations(const Lattice& lattice, const CVector& e) {
  const int nx = lattice.nx();
  const int ny = lattice.ny();
  if (e.size() != lattice.size()) fail(ErrorKind::invalid_input, "state size does not match lattice");
  CMatrix grid = CMatrix::Zero(nx, ny);
  for (int j = 0; j < lattice.size(); ++j) {
    const int g = lattice.grid_indices()[j];
    grid(g / ny, g % ny) = e[j];
  }
  auto dft = [](int n) {
    CMatrix F(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double ph = -2.0 * kPi * static_cast<double>((static_cast<long>(a) * b) % n) / n;
        F(a, b) = cplx(std::cos(ph), std::sin(ph));
      }
    return F;
  };
  const CMatrix out = dft(nx) * grid * dft(ny).transpose() / std::sqrt(static_cast<double>(nx) * ny);
  std::vector<double> pops(static_cast<std::size_t>(nx) * ny);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) pops[static_cast<std::size_t>(a) * ny + b] = std::norm(out(a, b));
  return pops;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& comment) {
  std::vector<std::string> header{"t"};
  for (int j = 0; j < traj.dim(); ++j) {
    header.push_back("re_" + std::to_string(j));
    header.push_back("im_" + std::to_string(j));
  }
  CsvWriter w(os, header, comment);
  std::vector<double> row;
  for (std::size_t i = 0; i < traj.count(); ++i) {
    row.assign(1, traj.times[i]);
    for (int j = 0; j < traj.dim(); ++j) {
      row.push_back(traj.states[i][j].real());
      row.push_back(traj.states[i][j].imag());
    }
    w.row(row);
  }
}

void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
  const char magic[8] = {'D', 'L', 'T', 'R', 'A', 'J', '1', '\0'};
  os.write(magic, 8);
  const std::int64_t dim = traj.dim();
  const std::int64_t count = static_cast<std::int64_t>(traj.count());
  os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  os.write(reinterpret_cast<const char*>(&traj.dt), sizeof traj.dt);
  os.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (std::size_t i = 0; i < traj.count(); ++i) {
    os.write(reinterpret_cast<const char*>(&traj.times[i]), sizeof(double));
    os.write(reinterpret_cast<const char*>(traj.states[i].data()),
             static_cast<std::streamsize>(sizeof(cplx) * traj.states[i].size()));
  }
}

}  // namespace darklattice
