#include <algorithm>
#include <cmath>
#include <sstream>

#include "darklattice/parallel.hpp"
#include "darklattice/protocols.hpp"

namespace darklattice {

namespace {

void check_subwavelength(const Lattice& lattice) {
  if (!(lattice.spacing() < kLambda0 / std::sqrt(2.0)))
    fail(ErrorKind::domain, "retrieval needs a sub-wavelength lattice (d < lambda0/sqrt(2))");
}

}  // namespace

RetrievalResult retrieval_experiment(const Lattice& lattice, const CouplingMatrix& coupling, double waist,
                                     double Delta_retrieve, double t_storage, const RetrievalOptions& opt) {
  check_subwavelength(lattice);
  if (!(t_storage >= 0.0)) fail(ErrorKind::invalid_input, "storage time must be >= 0");
  if (!(opt.t_max > 0.0)) fail(ErrorKind::invalid_input, "retrieval t_max must be positive");
  RealSpaceState state = prepare_stored_state(lattice, coupling, waist, opt.Delta_store, opt.drive);

  if (t_storage > 0.0) {
    EvolveOptions free;
    free.keep_history = false;
    const Trajectory hold = evolve_real_space(lattice, coupling, {}, std::nullopt, state, t_storage, opt.dt, free);
    state.e = hold.states.back();
  }

  EvolveOptions ev;
  ev.record_every = opt.record_every;
  ev.stop_norm = opt.stop_norm;
  const DetuningPattern release = preset_pattern(PatternKind::checkerboard, {cplx(Delta_retrieve, 0.0)});
  const Trajectory traj = evolve_real_space(lattice, coupling, {release}, std::nullopt, state, opt.t_max, opt.dt, ev);
  if (!(traj.norm_at(traj.count() - 1) < std::max(opt.stop_norm, 1e-4) * (1.0 + 1e-9))) {
    std::ostringstream os;
    os << "retrieval did not finish within t_max = " << opt.t_max << " (norm " << traj.norm_at(traj.count() - 1)
       << ")";
    fail(ErrorKind::truncated_transform, os.str());
  }

  DetectionMode mode;
  mode.waist = waist;
  mode.polarization = lattice.dipole();
  RetrievalResult out;
  out.waist = waist;
  out.record = mode_overlap(lattice, traj, mode);
  out.eta = out.record.eta;
  out.epsilon = 1.0 - out.eta;
  return out;
}

RetrievalResult retrieval_experiment(const Lattice& lattice, double waist, double Delta_retrieve, double t_storage,
                                     const RetrievalOptions& options) {
  check_subwavelength(lattice);
  return retrieval_experiment(lattice, coupling_matrix(lattice), waist, Delta_retrieve, t_storage, options);
}

std::vector<RetrievalResult> waist_sweep(const Lattice& lattice, const CouplingMatrix& coupling,
                                         const std::vector<double>& waists, double Delta_retrieve, double t_storage,
                                         const RetrievalOptions& options) {
  std::vector<RetrievalResult> out(waists.size());
  parallel_for(waists.size(), [&](std::size_t i) {
    out[i] = retrieval_experiment(lattice, coupling, waists[i], Delta_retrieve, t_storage, options);
  });
  return out;
}

WaistSearch optimal_waist(const Lattice& lattice, const CouplingMatrix& coupling, double Delta_retrieve,
                          double t_storage, const RetrievalOptions& options, double lo, double hi, double rel_tol) {
  if (hi <= 0.0) hi = 0.5 * std::min(lattice.nx(), lattice.ny());
  if (!(lo > 0.0) || !(hi > lo)) fail(ErrorKind::invalid_input, "invalid waist search interval");
  if (!(rel_tol > 0.0)) fail(ErrorKind::invalid_input, "waist search tolerance must be positive");
  const double d = lattice.spacing();
  WaistSearch ws;
  auto eps = [&](double x) {
    const double e = retrieval_experiment(lattice, coupling, x * d, Delta_retrieve, t_storage, options).epsilon;
    ws.evaluations.emplace_back(x * d, e);
    return e;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = eps(c), fe = eps(e);
  while ((b - a) > rel_tol * 0.5 * (a + b)) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = eps(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = eps(e);
    }
  }
  if (fc < fe) {
    ws.waist = c * d;
    ws.epsilon = fc;
  } else {
    ws.waist = e * d;
    ws.epsilon = fe;
  }
  return ws;
}

// ----------------------------------------------------------------- defects

std::vector<DefectSet> standard_defect_sets() {
  DefectSet one{"one", {{2, 0}}};
  DefectSet three{"three", {{2, 0}, {-1, -1}, {6, 3}}};
  DefectSet seven{"seven", {{0, 0}, {2, 0}, {-2, 2}, {-3, 1}, {5, -1}, {4, 4}, {8, 8}}};
  DefectSet nine = seven;
  nine.name = "nine";
  nine.holes.push_back({-1, 1});
  nine.holes.push_back({0, -3});
  return {one, three, seven, nine};
}

double defect_intensity_fraction(const Lattice& base, const std::vector<Vec2>& holes, double waist) {
  if (!(waist > 0.0)) fail(ErrorKind::invalid_input, "waist must be positive");
  const double d = base.spacing();
  auto weight = [&](double x, double y) { return std::exp(-2.0 * (x * x + y * y) / (waist * waist)); };
  double all = 0.0;
  for (const auto& r : base.positions()) all += weight(r.x(), r.y());
  double part = 0.0;
  for (const auto& h : holes) {
    const int j = base.find(Vec3(h.x() * d, h.y() * d, 0.0), 1e-6 * d);
    if (j < 0) fail(ErrorKind::invalid_input, "defect does not match a lattice site");
    const Vec3& r = base.position(j);
    part += weight(r.x(), r.y());
  }
  return part / all;
}

DefectSweep defect_sweep(const Lattice& base, const std::vector<DefectSet>& sets, const std::vector<double>& waists,
                         double Delta_retrieve, const RetrievalOptions& options) {
  if (sets.empty() || waists.empty()) fail(ErrorKind::invalid_input, "defect sweep needs sets and waists");
  std::vector<Lattice> lattices;
  for (const auto& s : sets) lattices.push_back(apply_defects(base, s.holes));
  std::vector<CouplingMatrix> couplings(sets.size() + 1);
  parallel_for(sets.size() + 1, [&](std::size_t i) {
    couplings[i] = coupling_matrix(i == 0 ? base : lattices[i - 1]);
  });

  const std::size_t nw = waists.size();
  const std::size_t per = sets.size() + 1;
  std::vector<double> eta(nw * per);
  parallel_for(nw * per, [&](std::size_t idx) {
    const std::size_t w = idx / per;
    const std::size_t s = idx % per;
    const Lattice& lat = s == 0 ? base : lattices[s - 1];
    eta[idx] = retrieval_experiment(lat, couplings[s], waists[w], Delta_retrieve, 0.0, options).eta;
  });

  DefectSweep out;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t w = 0; w < nw; ++w) {
    const double ref = eta[w * per];
    for (std::size_t s = 0; s < sets.size(); ++s) {
      DefectPoint p;
      p.set = sets[s].name;
      p.waist = waists[w];
      p.fraction = defect_intensity_fraction(base, sets[s].holes, waists[w]);
      p.eta = eta[w * per + s + 1];
      p.eta_reference = ref;
      p.drop = (ref - p.eta) / ref;
      sxy += p.fraction * p.drop;
      sxx += p.fraction * p.fraction;
      out.points.push_back(p);
    }
  }
  if (!(sxx > 0.0)) fail(ErrorKind::degenerate, "defect intensity fractions vanish");
  out.alpha = sxy / sxx;
  return out;
}

}  // namespace darklattice
