// Acceptance suite: one PASS/FAIL line per criterion. Arguments select criteria by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "darklattice/bands.hpp"
#include "darklattice/protocols.hpp"

using namespace darklattice;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- tolerances
constexpr double kDecayRelTol = 1e-8;
constexpr double kDecayMaxSeconds = 1.0;
constexpr double kSubradianceLimit = 0.05;
constexpr double kSubradianceMaxSeconds = 10.0;
constexpr double kRetrievalLimit = 5e-4;
constexpr double kDephasedTarget = 0.02;
constexpr double kDephasedTol = 0.01;
constexpr double kShapingL2 = 0.05;
constexpr double kSplittingTol = 0.10;
constexpr double kSidebandTol = 0.10;
constexpr double kSidebandMinWeight = 0.01;  // orders below this share are not compared
constexpr double kSteeringSymmetryTol = 1e-3;
constexpr double kSteeringMinMagnitude = 0.05;  // ratio compared where |E| is at least this
constexpr double kSuppressionLimit = 0.05;
constexpr double kRabiAgreement = 1e-8;
constexpr int kRabiPeriods = 10;
constexpr double kRabiContrastFraction = 0.9;
constexpr double kQTarget = 5e3;
constexpr double kQFactor = 3.0;
constexpr double kQPhiMin = kPi;
constexpr double kAlphaTarget = 1.19;
constexpr double kAlphaTol = 0.15;
constexpr double kFarDropLimit = 0.005;
constexpr double kNearRatioTarget = 0.96;
constexpr double kNearRatioTol = 0.01;

const CVec3 kDip = circular_dipole();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Shared {
  double d = 0.3;
  Lattice lat21;
  CouplingMatrix cm21;
  bool ready = false;
  void init() {
    if (ready) return;
    lat21 = build_square_lattice(21, 21, d, kDip);
    cm21 = coupling_matrix(lat21);
    ready = true;
  }
};
Shared shared;

// 1
Outcome single_atom_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  const Lattice lat = build_square_lattice(1, 1, 0.3, kDip);
  RealSpaceState s;
  s.e = CVector::Ones(1);
  const Trajectory tr = evolve_real_space(lat, coupling_matrix(lat), {}, std::nullopt, s, 5.0, 1e-3,
                                          {.keep_history = false});
  const double rel = std::abs(tr.norm_at(0) - std::exp(-5.0)) / std::exp(-5.0);
  const double secs = seconds_since(t0);
  return {rel < kDecayRelTol && secs < kDecayMaxSeconds,
          "relative error " + num(rel) + " (limit " + num(kDecayRelTol) + "), " + num(secs) + " s"};
}

// 2
Outcome subradiance() {
  const auto t0 = std::chrono::steady_clock::now();
  const double d = 0.3;
  const Vec2 M(kPi / d, kPi / d);
  const double g150 = std::abs(dispersion(M, d, kDip, 150.0 * d).Gamma);
  const double g75 = std::abs(dispersion(M, d, kDip, 75.0 * d).Gamma);
  const double secs = seconds_since(t0);
  return {g150 < kSubradianceLimit && g150 < g75 && secs < kSubradianceMaxSeconds,
          "|Gamma_M| = " + num(g150) + " at R = 150d, " + num(g75) + " at R = 75d, " + num(secs) + " s"};
}

// 3
Outcome retrieval_fidelity() {
  shared.init();
  const double d = shared.d;
  const WaistSearch best = optimal_waist(shared.lat21, shared.cm21, 2.0, 0.0);
  const auto ends = waist_sweep(shared.lat21, shared.cm21, {2.0 * d, 10.5 * d}, 2.0, 0.0);
  const bool u = ends[0].epsilon > best.epsilon && ends[1].epsilon > best.epsilon;
  return {best.epsilon < kRetrievalLimit && u,
          "optimum eps = " + num(best.epsilon) + " at waist " + num(best.waist / d) + "d (limit " +
              num(kRetrievalLimit) + "); eps(2d) = " + num(ends[0].epsilon) + ", eps(10.5d) = " +
              num(ends[1].epsilon)};
}

// 4
Outcome storage_dephasing() {
  shared.init();
  const WaistSearch best = optimal_waist(shared.lat21, shared.cm21, 2.0, 50.0);
  return {std::abs(best.epsilon - kDephasedTarget) <= kDephasedTol,
          "eps = " + num(best.epsilon) + " at waist " + num(best.waist / shared.d) + "d (target " +
              num(kDephasedTarget) + " +- " + num(kDephasedTol) + ")"};
}

// 5
Outcome curvature_ordering() {
  std::ostringstream os;
  bool ok = true;
  for (auto dir : {CurvatureDirection::M_Gamma, CurvatureDirection::M_X}) {
    const double c15 = std::abs(curvature_at_M(0.15, dir, kDip, 150.0 * 0.15));
    const double c20 = std::abs(curvature_at_M(0.20, dir, kDip, 150.0 * 0.20));
    const double c30 = std::abs(curvature_at_M(0.30, dir, kDip, 150.0 * 0.30));
    ok = ok && c20 < c15 && c20 < c30;
    os << (dir == CurvatureDirection::M_Gamma ? "M-G" : "M-X") << " |c| = " << num(c15) << ", " << num(c20)
       << ", " << num(c30) << " at d = 0.15, 0.2, 0.3; ";
  }
  return {ok, os.str()};
}

// 6
Outcome pulse_shaping() {
  const double d = 0.2;
  const Lattice lat = build_square_lattice(21, 21, d, kDip);
  const CouplingMatrix cm = coupling_matrix(lat);
  std::ostringstream os;
  bool ok = true;
  for (auto k : {WindowKind::blackman, WindowKind::tukey, WindowKind::sine, WindowKind::triangular}) {
    const ShapingResult r = shaping_experiment(lat, cm, window_shape(k, 10.0, 1.0), 1.2);
    ok = ok && r.l2_error < kShapingL2;
    os << to_string(k) << " L2 = " << num(r.l2_error) << "; ";
  }
  os << "limit " << num(kShapingL2);
  return {ok, os.str()};
}

// 7
Outcome two_color_splitting() {
  std::ostringstream os;
  bool ok = true;
  const auto omega = frequency_grid(-15.0, 15.0, 0.01);
  for (double Delta : {2.0, 5.0}) {
    int side[2] = {0, 0};
    int idx = 0;
    for (double d : {0.2, 0.3}) {
      const Lattice lat = build_square_lattice(21, 21, d, kDip);
      const CouplingMatrix cm = coupling_matrix(lat);
      const FiniteSpectrum fs = finite_two_color(lat, cm, Delta, 6.0 * d, omega);
      const Dispersion rad = dispersion(Vec2::Zero(), d, kDip);
      const Dispersion dark = dispersion(Vec2(kPi / d, kPi / d), d, kDip);
      const TwoColorSpectrum an = two_color_spectrum(Delta, dark.J, rad.J, rad.Gamma, {0.0});
      const double sep = fs.fitted.size() == 2 ? fs.fitted[1].center - fs.fitted[0].center : 0.0;
      const double rel = std::abs(sep - an.separation) / an.separation;
      ok = ok && rel < kSplittingTol;
      // Side relative to the bare transition frequency.
      side[idx++] = fs.predominant > 0.0 ? 1 : -1;
      os << "D=" << num(Delta) << ",d=" << num(d) << ": sep " << num(sep) << " vs " << num(an.separation)
         << " (" << num(100.0 * rel) << "%), main peak at " << num(fs.predominant) << "; ";
    }
    ok = ok && side[0] != side[1];
  }
  return {ok, os.str()};
}

// 8
Outcome sidebands() {
  shared.init();
  const double d = shared.d;
  std::ostringstream os;
  bool ok = true;
  SpectrumOptions opt;
  opt.dt = 0.005;
  opt.record_every = 2;
  const double Omega = 2.0 * kPi;
  for (double ratio : {0.5, 1.5}) {
    const SidebandMeasurement m =
        finite_sidebands(shared.lat21, shared.cm21, 0.75, ratio * Omega, Omega, 6.0 * d, 3, opt);
    os << "delta/Omega=" << num(ratio) << ":";
    for (std::size_t i = 0; i < m.orders.size(); ++i) {
      if (m.expected[i] < kSidebandMinWeight) continue;
      const double rel = std::abs(m.measured[i] - m.expected[i]) / m.expected[i];
      ok = ok && rel < kSidebandTol;
      os << " n=" << m.orders[i] << " " << num(m.measured[i]) << "/" << num(m.expected[i]);
    }
    os << "; ";
  }
  return {ok, os.str()};
}

// 9
Outcome steering() {
  const double d = 0.3;
  const Lattice lat = build_square_lattice(41, 41, d, kDip);
  const CouplingMatrix cm = coupling_matrix(lat);
  std::ostringstream os;

  const SteeringResult a = steering_experiment(lat, cm, preset_pattern(PatternKind::period3_x, {0.0, 0.5}), 12.0 * d);
  const auto& th = a.profile.theta;
  const auto& mag = a.profile.magnitude;
  const std::size_t n = th.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m1 = mag[i], m2 = mag[n - 1 - i];
    if (std::max(m1, m2) < kSteeringMinMagnitude) continue;
    worst = std::max(worst, std::abs(m1 / m2 - 1.0));
  }
  const double step = th[1] - th[0];
  const double expect = std::asin(1.0 / (6.0 * d));
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const auto left = std::max_element(mag.begin(), mag.begin() + half) - mag.begin();
  const auto right = std::max_element(mag.begin() + half + 1, mag.end()) - mag.begin();
  const bool peaks_ok = std::abs(th[left] + expect) <= step * (1.0 + 1e-9) &&
                        std::abs(th[right] - expect) <= step * (1.0 + 1e-9);
  os << "A: max |ratio-1| = " << num(worst) << ", peaks at sin = " << num(std::sin(th[left])) << ", "
     << num(std::sin(th[right])) << " (expected +-" << num(1.0 / (6.0 * d)) << "); ";

  const cplx beta = std::polar(0.75, kPi / 4.0);
  const SteeringResult dres =
      steering_experiment(lat, cm, preset_pattern(PatternKind::period4_x, {0.0, beta, 0.0}), 12.0 * d);
  const auto& md = dres.profile.magnitude;
  const std::size_t mid = md.size() / 2;
  double oblique = 0.0;
  for (std::size_t i = 0; i < md.size(); ++i)
    if (std::abs(dres.profile.theta[i]) > 0.2) oblique = std::max(oblique, md[i]);
  const double ratio = md[mid] / oblique;
  os << "D: |E(0)|/oblique = " << num(ratio) << " (" << to_string(dres.report.symmetry) << ")";
  return {worst <= kSteeringSymmetryTol && peaks_ok && ratio < kSuppressionLimit, os.str()};
}

// 10
Outcome rabi() {
  std::ostringstream os;
  bool ok = true;
  {
    const RabiPair p{0.4, -0.6, 1.3};
    FewLevelModel m;
    m.levels = {{"1", p.J1, 0.0}, {"2", p.J2, 0.0}};
    m.couplings = CMatrix::Zero(2, 2);
    m.couplings(0, 1) = m.couplings(1, 0) = p.Delta;
    CVector v0(2);
    v0 << 1.0, 0.0;
    const Trajectory tr = evolve_few_level(m, v0, kRabiPeriods * 2.0 * kPi / p.omega_gen(), 1e-3, 10);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.count(); ++i)
      worst = std::max(worst, std::abs(tr.states[i][1] - rabi_pair_analytic(p, tr.times[i])));
    ok = ok && worst < kRabiAgreement;
    os << "analytic vs integrator " << num(worst) << "; ";
  }
  shared.init();
  const double d = shared.d;
  const double JX = dispersion(Vec2(kPi / d, 0.0), d, kDip).J;
  const double JM = dispersion(Vec2(kPi / d, kPi / d), d, kDip).J;
  for (double Delta : {0.3, 5.0}) {
    const RabiPair p{JX, JM, Delta};
    const double period = 2.0 * kPi / p.omega_gen();
    const RabiRun run = rabi_experiment(shared.lat21, shared.cm21, Delta, 6.0 * d, (kRabiPeriods + 0.5) * period);
    const double contrast = std::pow(Delta / p.omega_gen(), 2);
    bool full = run.maxima.size() >= static_cast<std::size_t>(kRabiPeriods);
    double lowest = 1.0;
    for (std::size_t k = 0; k < run.maxima.size() && k < static_cast<std::size_t>(kRabiPeriods); ++k) {
      const std::size_t i = run.maxima[k];
      const double frac = run.pop_b[i] / (run.pop_a[i] + run.pop_b[i]);
      lowest = std::min(lowest, frac / contrast);
    }
    full = full && lowest >= kRabiContrastFraction;
    ok = ok && full;
    os << "Delta=" << num(Delta) << ": " << run.maxima.size() << " maxima, min peak/contrast " << num(lowest)
       << ", norm " << num(run.norm.back()) << "; ";
  }
  const double Q = quality_factor_for_waist(d, 10.0, 6.0 * d, kQPhiMin, kDip);
  const bool q_ok = Q > kQTarget / kQFactor && Q < kQTarget * kQFactor;
  ok = ok && q_ok;
  os << "Q(Delta=10, waist 6d, Phi_min=pi) = " << num(Q);
  return {ok, os.str()};
}

// 11
Outcome defects() {
  shared.init();
  const double d = shared.d;
  std::vector<double> waists{3.0 * d, 4.0 * d, 5.0 * d, 6.0 * d};
  const DefectSweep sweep = defect_sweep(shared.lat21, standard_defect_sets(), waists);
  const DefectSweep far = defect_sweep(shared.lat21, {{"far", {Vec2(8.0, 8.0)}}}, {4.0 * d});
  double near_ratio = 0.0;
  for (const auto& p : sweep.points)
    if (p.set == "one" && std::abs(p.waist - 4.0 * d) < 1e-12) near_ratio = p.eta / p.eta_reference;
  const double far_drop = far.points.at(0).drop;
  const bool ok = std::abs(sweep.alpha - kAlphaTarget) <= kAlphaTol && far_drop < kFarDropLimit &&
                  std::abs(near_ratio - kNearRatioTarget) <= kNearRatioTol;
  return {ok, "alpha = " + num(sweep.alpha) + " (target " + num(kAlphaTarget) + " +- " + num(kAlphaTol) +
                  "), far drop = " + num(far_drop) + ", near eta ratio = " + num(near_ratio)};
}

// 12
Outcome property_suites() {
  const char* path = std::getenv("DARKLATTICE_PROPERTIES");
  const std::string exe = path ? path : DARKLATTICE_PROPERTIES_BIN;
  const int status = std::system(("\"" + exe + "\" > /dev/null 2>&1").c_str());
  return {status == 0, "property suite exit status " + std::to_string(status)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"single-atom decay", single_atom_decay},
      {"subradiance at M", subradiance},
      {"retrieval fidelity", retrieval_fidelity},
      {"storage dephasing", storage_dephasing},
      {"curvature ordering", curvature_ordering},
      {"pulse shaping", pulse_shaping},
      {"two-colour splitting", two_color_splitting},
      {"sidebands", sidebands},
      {"steering", steering},
      {"Rabi dynamics", rabi},
      {"defect law", defects},
      {"property suites", property_suites},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
