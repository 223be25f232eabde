#include <algorithm>
#include <cmath>
#include <map>

#include "darklattice/protocols.hpp"

namespace darklattice {

std::string to_string(SteeringSymmetry s) {
  switch (s) {
    case SteeringSymmetry::symmetric: return "symmetric";
    case SteeringSymmetry::asymmetric: return "asymmetric";
    case SteeringSymmetry::perpendicular_suppressed: return "perpendicular-suppressed";
    case SteeringSymmetry::fully_asymmetric: return "fully-asymmetric";
  }
  return "?";
}

namespace {

int mod(int a, int p) { return ((a % p) + p) % p; }

// Summed amplitude per x harmonic.
std::map<int, cplx> harmonics(const DetuningPattern& pattern) {
  std::map<int, cplx> out;
  for (const auto& c : pattern.components()) out[mod(c.qx, pattern.period_x())] += c.amplitude;
  return out;
}

}  // namespace

SteeringReport classify_steering(const DetuningPattern& pattern, double spacing) {
  if (!(spacing > 0.0)) fail(ErrorKind::invalid_input, "spacing must be positive");
  const int P = pattern.period_x();
  if (pattern.period_y() != 1 || (P != 3 && P != 4))
    fail(ErrorKind::invalid_input, "steering needs a period-3 or period-4 pattern along x");
  const auto h = harmonics(pattern);
  auto amp = [&](int q) {
    const auto it = h.find(q);
    return it == h.end() ? cplx(0.0, 0.0) : it->second;
  };

  // k_x in units of pi/(P d), so X = P and harmonic q shifts by 2q.
  const double scale = spacing * 1e-12;
  std::vector<int> orbit{P};  // X in units of pi/(P d)
  for (std::size_t i = 0; i < orbit.size(); ++i)
    for (const auto& [q, a] : h) {
      if (q == 0 || std::abs(a) <= scale) continue;
      const int next = mod(orbit[i] + 2 * q, 2 * P);
      if (std::find(orbit.begin(), orbit.end(), next) == orbit.end()) orbit.push_back(next);
    }

  SteeringReport rep;
  rep.period = P;
  for (std::size_t i = 1; i < orbit.size(); ++i) {
    int m = orbit[i];
    if (m > P) m -= 2 * P;
    const double kx = m * kPi / (P * spacing);
    rep.coupled.emplace_back(kx, 0.0);
    const bool inside = std::abs(kx) <= kK0 * (1.0 + 1e-12);
    rep.inside_light_cone.push_back(inside);
    if (inside) rep.sin_theta.push_back(kx / kK0);
  }
  std::sort(rep.sin_theta.begin(), rep.sin_theta.end());

  const cplx beta = amp(1);
  const double bmag = std::abs(beta);
  const bool beta_real = std::abs(beta.imag()) <= 1e-12 * std::max(bmag, 1e-300);
  if (P == 3) {
    rep.symmetry = beta_real ? SteeringSymmetry::symmetric : SteeringSymmetry::asymmetric;
    return rep;
  }
  const cplx delta = amp(2);
  if (std::abs(delta) > 1e-12 * std::max(1.0, bmag)) {
    rep.symmetry = SteeringSymmetry::fully_asymmetric;
  } else if (bmag == 0.0 || beta_real || std::abs(beta.real()) <= 1e-12 * bmag) {
    rep.symmetry = SteeringSymmetry::symmetric;
  } else if (std::abs((beta * beta).real()) <= 1e-9 * bmag * bmag) {
    rep.symmetry = SteeringSymmetry::perpendicular_suppressed;
  } else {
    rep.symmetry = SteeringSymmetry::asymmetric;
  }
  return rep;
}

SteeringResult steering_experiment(const Lattice& lattice, const CouplingMatrix& coupling,
                                   const DetuningPattern& pattern, double waist, const SteeringOptions& opt) {
  if (opt.theta_points < 3) fail(ErrorKind::invalid_input, "theta grid needs at least 3 points");
  SteeringResult out;
  out.report = classify_steering(pattern, lattice.spacing());
  StoreOptions so;
  so.pattern = PatternKind::stripe_x;
  const RealSpaceState s0 = prepare_stored_state(lattice, coupling, waist, opt.Delta_store, 1e-3, so);
  EvolveOptions ev;
  ev.record_every = opt.record_every;
  ev.stop_norm = opt.stop_norm;
  const Trajectory traj = evolve_real_space(lattice, coupling, {pattern}, std::nullopt, s0, opt.t_max, opt.dt, ev);
  std::vector<double> theta(static_cast<std::size_t>(opt.theta_points));
  for (int i = 0; i < opt.theta_points; ++i) theta[i] = -0.5 * kPi + kPi * i / (opt.theta_points - 1);
  out.profile = angular_profile(lattice, traj, Plane::xz, theta);
  return out;
}

// -------------------------------------------------------------------- Rabi

double RabiPair::omega_gen() const {
  const double h = 0.5 * (J1 - J2);
  return std::sqrt(Delta * Delta + h * h);
}

cplx rabi_pair_analytic(const RabiPair& p, double t) {
  const double W = p.omega_gen();
  if (W == 0.0) return 0.0;
  const double ph = -0.5 * (p.J1 + p.J2) * t;
  return cplx(0.0, p.Delta / W) * cplx(std::cos(ph), std::sin(ph)) * std::sin(W * t);
}

double generalized_rabi(const Vec2& k, const Vec2& Q, double Delta, const JAccessor& J, double spacing) {
  const double a = J(wrap_to_zone(k, spacing));
  const double b = J(wrap_to_zone(k + Q, spacing));
  const double h = 0.5 * (a - b);
  return std::sqrt(Delta * Delta + h * h);
}

double quality_factor(const Vec2& k, const Vec2& k_c, double Delta, double Phi_min, const JAccessor& J,
                      const Vec2& Q, double spacing) {
  if (!(Phi_min > 0.0) || Phi_min > kPi * (1.0 + 1e-12))
    fail(ErrorKind::invalid_input, "Phi_min must lie in (0, pi]");
  if (!J) fail(ErrorKind::invalid_input, "missing dispersion accessor");
  for (const Vec2* v : {&k, &k_c})
    if (wrap_to_zone(*v, spacing).norm() <= kK0)
      fail(ErrorKind::domain, "quality factor needs momenta outside the light cone");
  const double wc = generalized_rabi(k_c, Q, Delta, J, spacing);
  const double wk = generalized_rabi(k, Q, Delta, J, spacing);
  const double den = std::abs(wc - wk);
  if (den < 1e-12) return kInfiniteQ;
  return wc * (Phi_min / kPi) / den;
}

double containment_radius(double waist, double fraction) {
  if (!(waist > 0.0)) fail(ErrorKind::invalid_input, "waist must be positive");
  if (!(fraction > 0.0) || !(fraction < 1.0)) fail(ErrorKind::invalid_input, "fraction must lie in (0, 1)");
  return std::sqrt(-2.0 * std::log(1.0 - fraction)) / waist;
}

double quality_factor_for_waist(double spacing, double Delta, double waist, double Phi_min, const CVec3& dipole,
                                int directions) {
  if (directions < 1) fail(ErrorKind::invalid_input, "need at least one direction");
  const Vec2 X(kPi / spacing, 0.0);
  const Vec2 Q(0.0, kPi / spacing);
  const double kr = containment_radius(waist);
  const JAccessor J = [&](const Vec2& k) { return dispersion(k, spacing, dipole).J; };
  double best = kInfiniteQ;
  for (int i = 0; i < directions; ++i) {
    const double a = 2.0 * kPi * i / directions;
    const Vec2 k = X + kr * Vec2(std::cos(a), std::sin(a));
    best = std::min(best, quality_factor(k, X, Delta, Phi_min, J, Q, spacing));
  }
  return best;
}

namespace {

struct Partition {
  std::vector<int> owner;  // target index per grid momentum, -1 if none
};

double wrap_phase(double x) { return std::remainder(x, 2.0 * kPi); }

// Assign each DFT momentum (units of 1/d) to the nearest target momentum.
Partition partition(const Lattice& lattice, const std::vector<Vec2>& targets) {
  const int nx = lattice.nx(), ny = lattice.ny();
  const double d = lattice.spacing();
  Partition p;
  p.owner.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      const double kx = 2.0 * kPi * a / nx;
      const double ky = 2.0 * kPi * b / ny;
      double best = 1e300;
      int who = -1;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const double dx = wrap_phase(kx - targets[t].x() * d);
        const double dy = wrap_phase(ky - targets[t].y() * d);
        const double r = dx * dx + dy * dy;
        if (r < best - 1e-12) {
          best = r;
          who = static_cast<int>(t);
        }
      }
      p.owner[static_cast<std::size_t>(a) * ny + b] = who;
    }
  return p;
}

std::vector<std::vector<double>> populations(const Lattice& lattice, const Trajectory& traj, const Partition& part,
                                             std::size_t n_targets) {
  std::vector<std::vector<double>> out(n_targets, std::vector<double>(traj.count(), 0.0));
  for (std::size_t i = 0; i < traj.count(); ++i) {
    const auto pops = momentum_populations(lattice, traj.states[i]);
    for (std::size_t g = 0; g < pops.size(); ++g)
      if (part.owner[g] >= 0) out[static_cast<std::size_t>(part.owner[g])][i] += pops[g];
  }
  return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) out.push_back(i);
  return out;
}

Trajectory stored_x_run(const Lattice& lattice, const CouplingMatrix& coupling, const DetuningPattern& pattern,
                        double waist, double t_end, double dt, int record_every, double Delta_store) {
  StoreOptions so;
  so.pattern = PatternKind::stripe_x;
  const RealSpaceState s0 = prepare_stored_state(lattice, coupling, waist, Delta_store, 1e-3, so);
  EvolveOptions ev;
  ev.record_every = record_every;
  return evolve_real_space(lattice, coupling, {pattern}, std::nullopt, s0, t_end, dt, ev);
}

}  // namespace

RabiRun rabi_experiment(const Lattice& lattice, const CouplingMatrix& coupling, double Delta, double waist,
                        double t_end, double dt, int record_every, double Delta_store) {
  const double d = lattice.spacing();
  const auto traj = stored_x_run(lattice, coupling, preset_pattern(PatternKind::stripe_y, {cplx(Delta, 0.0)}), waist,
                                 t_end, dt, record_every, Delta_store);
  const std::vector<Vec2> targets{{kPi / d, 0.0}, {kPi / d, kPi / d}};
  // Split by |k_y| only: near 0 belongs to X, near pi to M.
  Partition part;
  const int nx = lattice.nx(), ny = lattice.ny();
  part.owner.assign(static_cast<std::size_t>(nx) * ny, 0);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      const double ky = std::abs(wrap_phase(2.0 * kPi * b / ny));
      part.owner[static_cast<std::size_t>(a) * ny + b] = std::abs(ky - kPi) < 0.5 * kPi ? 1 : 0;
    }
  const auto pops = populations(lattice, traj, part, targets.size());
  RabiRun out;
  out.times = traj.times;
  out.pop_a = pops[0];
  out.pop_b = pops[1];
  out.norm.resize(traj.count());
  for (std::size_t i = 0; i < traj.count(); ++i) out.norm[i] = traj.norm_at(i);
  out.maxima = local_maxima(out.pop_b);
  return out;
}

CycleResult cycle_experiment(const Lattice& lattice, const CouplingMatrix& coupling, const DetuningPattern& pattern,
                             const std::vector<Vec2>& momenta, const std::vector<std::string>& labels, double waist,
                             double t_end, double dt, int record_every, double Delta_store) {
  if (momenta.size() < 2) fail(ErrorKind::invalid_input, "cycle needs at least two target momenta");
  if (!labels.empty() && labels.size() != momenta.size())
    fail(ErrorKind::invalid_input, "cycle labels do not match momenta");
  const auto traj = stored_x_run(lattice, coupling, pattern, waist, t_end, dt, record_every, Delta_store);
  CycleResult out;
  out.momenta = momenta;
  out.labels = labels;
  out.times = traj.times;
  out.populations = populations(lattice, traj, partition(lattice, momenta), momenta.size());

  std::vector<std::pair<std::size_t, int>> events;
  for (std::size_t s = 0; s < momenta.size(); ++s)
    if (!out.times.empty() && out.populations[s][0] > 0.5 * traj.norm_at(0)) events.emplace_back(0, static_cast<int>(s));
  for (std::size_t s = 0; s < momenta.size(); ++s)
    for (std::size_t i : local_maxima(out.populations[s]))
      if (out.populations[s][i] > 0.5 * traj.norm_at(i)) events.emplace_back(i, static_cast<int>(s));
  std::sort(events.begin(), events.end());
  for (const auto& [i, s] : events)
    if (out.order.empty() || out.order.back() != s) out.order.push_back(s);
  return out;
}

}  // namespace darklattice
