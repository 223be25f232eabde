#include <algorithm>
#include <cmath>
#include <sstream>

#include "darklattice/protocols.hpp"

namespace darklattice {

WindowKind parse_window_kind(const std::string& name) {
  if (name == "blackman") return WindowKind::blackman;
  if (name == "tukey") return WindowKind::tukey;
  if (name == "triangular") return WindowKind::triangular;
  if (name == "sine") return WindowKind::sine;
  fail(ErrorKind::invalid_input, "unknown window '" + name + "'");
}

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::blackman: return "blackman";
    case WindowKind::tukey: return "tukey";
    case WindowKind::triangular: return "triangular";
    case WindowKind::sine: return "sine";
  }
  return "?";
}

WindowShape window_shape(WindowKind kind, double t_end, double total, double taper) {
  if (!(t_end > 0.0)) fail(ErrorKind::invalid_input, "window t_end must be positive");
  // total > 1 is left to the solver, which reports it as infeasible.
  if (!(total > 0.0)) fail(ErrorKind::invalid_input, "window total must be positive");
  if (!(taper >= 0.0) || taper > 1.0) fail(ErrorKind::invalid_input, "tukey taper must lie in [0, 1]");
  return WindowShape{kind, t_end, total, taper};
}

double WindowShape::value(double t) const {
  if (!(t >= 0.0) || t > t_end) return 0.0;
  const double x = t / t_end;
  double w = 0.0, mean = 1.0;
  switch (kind) {
    case WindowKind::blackman:
      w = 0.42 - 0.5 * std::cos(2.0 * kPi * x) + 0.08 * std::cos(4.0 * kPi * x);
      mean = 0.42;
      break;
    case WindowKind::tukey: {
      const double a = taper;
      if (a > 0.0 && x < 0.5 * a)
        w = 0.5 * (1.0 - std::cos(2.0 * kPi * x / a));
      else if (a > 0.0 && x > 1.0 - 0.5 * a)
        w = 0.5 * (1.0 - std::cos(2.0 * kPi * (1.0 - x) / a));
      else
        w = 1.0;
      mean = 1.0 - 0.5 * a;
      break;
    }
    case WindowKind::triangular:
      w = 1.0 - std::abs(2.0 * x - 1.0);
      mean = 0.5;
      break;
    case WindowKind::sine:
      w = std::sin(kPi * x);
      mean = 2.0 / kPi;
      break;
  }
  return std::max(w, 0.0) * total / (mean * t_end);
}

std::vector<double> WindowShape::sample(const std::vector<double>& times) const {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = value(times[i]);
  return out;
}

double DetuningSequence::value_at(double t) const {
  if (times.empty()) return 0.0;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const double h = times[1] - times[0];
  auto i = static_cast<std::size_t>((t - times.front()) / h);
  i = std::min(i, times.size() - 2);
  const double f = (t - times[i]) / (times[i + 1] - times[i]);
  return values[i] + f * (values[i + 1] - values[i]);
}

DetuningSequence solve_detuning_sequence(const WindowShape& target, double Gamma_r, double J,
                                         const SolverOptions& opt) {
  if (!(Gamma_r > 0.0)) fail(ErrorKind::invalid_input, "Gamma_r must be positive");
  if (!(opt.dt > 0.0)) fail(ErrorKind::invalid_input, "solver dt must be positive");
  if (!(opt.cap > 0.0)) fail(ErrorKind::invalid_input, "detuning cap must be positive");
  if (!(target.t_end > 0.0)) fail(ErrorKind::invalid_input, "window t_end must be positive");
  if (target.total > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "target releases " << target.total << " > 1 stored excitation";
    fail(ErrorKind::infeasible, os.str());
  }
  const double dt = opt.dt;
  const long nst = std::lround(target.t_end / dt);
  if (nst < 2) fail(ErrorKind::invalid_input, "solver dt too large for the window");

  DetuningSequence seq;
  seq.plateau_level = opt.plateau;
  seq.cap = opt.cap;
  seq.times.resize(nst + 1);
  seq.values.assign(nst + 1, 0.0);
  for (long k = 0; k <= nst; ++k) seq.times[k] = k * dt;

  const cplx I(0.0, 1.0);
  const double damp = 1.0 - 0.5 * Gamma_r * dt;
  cplx vd = 1.0, vr = 0.0;
  double prev = 0.0;
  long plateau = -1;
  for (long k = 1; k <= nst; ++k) {
    const double f = target.value(seq.times[k]);
    double x = 0.0;
    if (plateau < 0) {
      const bool late = seq.times[k - 1] > 0.9 * target.t_end;
      const double a = dt * dt * std::norm(vd);
      const double b = 2.0 * dt * damp * (vr * std::conj(vd)).imag();
      const double c = -f / Gamma_r + std::norm(vr) * damp * damp;
      const double disc = b * b - 4.0 * a * c;
      if (!(a > 0.0)) {
        x = 0.0;
      } else if (disc < 0.0) {
        x = -b / (2.0 * a);
        if (late) plateau = k - 1;
      } else {
        const double s = std::sqrt(disc);
        const double r1 = (-b + s) / (2.0 * a);
        const double r2 = (-b - s) / (2.0 * a);
        if (std::abs(std::abs(r1) - std::abs(r2)) > 1e-12)
          x = std::abs(r1) < std::abs(r2) ? r1 : r2;
        else
          x = std::abs(r1 - prev) <= std::abs(r2 - prev) ? r1 : r2;
      }
      if (plateau < 0 && std::abs(x) > opt.cap) {
        if (late) plateau = k - 1;
        x = std::copysign(opt.cap, x);
      }
      x = std::clamp(x, -opt.cap, opt.cap);
    }
    if (plateau >= 0) x = opt.plateau;
    seq.values[k - 1] = x;
    prev = x;
    const cplx nd = vd + dt * (-I * J * vd + I * x * vr);
    const cplx nr = vr + dt * (I * x * vd - 0.5 * Gamma_r * vr);
    vd = nd;
    vr = nr;
  }
  seq.values[nst] = plateau >= 0 ? opt.plateau : seq.values[nst - 1];
  if (plateau >= 0) seq.plateau_start = seq.times[plateau];
  return seq;
}

ShapingResult shaping_experiment(const Lattice& lattice, const CouplingMatrix& coupling, const WindowShape& target,
                                 double waist, const ShapingOptions& opt) {
  if (!(opt.tail >= 0.0)) fail(ErrorKind::invalid_input, "shaping tail must be >= 0");
  const double d = lattice.spacing();
  const Dispersion rad = dispersion(Vec2::Zero(), d, lattice.dipole());
  const Dispersion dark = dispersion(Vec2(kPi / d, kPi / d), d, lattice.dipole());

  ShapingResult out;
  out.Gamma_r = rad.Gamma;
  out.J = dark.J - rad.J;
  out.sequence = solve_detuning_sequence(target, out.Gamma_r, out.J, opt.solver);

  const RealSpaceState s0 = prepare_stored_state(lattice, coupling, waist, opt.Delta_store, 1e-3);
  const DetuningSequence& seq = out.sequence;
  const DetuningPattern release =
      preset_pattern(PatternKind::checkerboard, {cplx(1.0, 0.0)}).with_envelope([&seq](double t) {
        return seq.value_at(t);
      });
  const Trajectory traj =
      evolve_real_space(lattice, coupling, {release}, std::nullopt, s0, target.t_end + opt.tail, opt.dt);

  DetectionMode mode;
  mode.waist = waist;
  mode.polarization = lattice.dipole();
  const PhotonRecord rec = mode_overlap(lattice, traj, mode);
  out.times = rec.times;
  out.achieved = rec.dndt;
  out.target = target.sample(rec.times);
  out.eta = rec.eta;
  out.compare_until = seq.plateau_start.value_or(target.t_end);

  double num2 = 0.0, den2 = 0.0, num1 = 0.0, den1 = 0.0;
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    if (out.times[i] > out.compare_until + 1e-12) break;
    const double diff = out.achieved[i] - out.target[i];
    num2 += diff * diff;
    den2 += out.target[i] * out.target[i];
    num1 += std::abs(diff);
    den1 += out.target[i];
  }
  out.l2_error = den2 > 0.0 ? std::sqrt(num2 / den2) : 0.0;
  out.l1_error = den1 > 0.0 ? num1 / den1 : 0.0;
  return out;
}

}  // namespace darklattice
