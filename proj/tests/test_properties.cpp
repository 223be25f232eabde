#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "cli_support.hpp"
#include "darklattice/dynamics.hpp"
#include "darklattice/greens.hpp"
#include "darklattice/pattern.hpp"

using namespace darklattice;
namespace fs = std::filesystem;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

CVec3 random_dipole() {
  CVec3 v(cplx(uniform(-1, 1), uniform(-1, 1)), cplx(uniform(-1, 1), uniform(-1, 1)),
          cplx(uniform(-1, 1), uniform(-1, 1)));
  return v.normalized();
}

CVector random_state(int n) {
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(uniform(-1, 1), uniform(-1, 1));
  return v.normalized();
}

}  // namespace

TEST_CASE("coupling matrices are symmetric with Hermitian PSD decay part") {
  for (int trial = 0; trial < 12; ++trial) {
    const int nx = 2 + static_cast<int>(uniform(0, 6));
    const int ny = 1 + static_cast<int>(uniform(0, 6));
    const double d = uniform(0.1, 0.7);
    const CVec3 dip = trial % 3 == 0 ? circular_dipole() : random_dipole();
    const CouplingMatrix cm = coupling_matrix(build_square_lattice(nx, ny, d, dip));
    const CMatrix& M = cm.matrix();
    CAPTURE(nx);
    CAPTURE(ny);
    CAPTURE(d);
    // Reciprocity for a real Green tensor contracted with d^dagger ... d.
    CHECK((cm.J() - cm.J().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cm.Gamma() - cm.Gamma().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cm.Gamma());
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
    CHECK(cm.gamma_max() <= es.eigenvalues().maxCoeff() * (1.0 + 1e-6));
    CHECK(cm.gamma_max() >= es.eigenvalues().maxCoeff() * 0.9);
    for (int j = 0; j < cm.size(); ++j) CHECK(std::abs(M(j, j) - cplx(0.0, -0.5)) < 1e-12);
  }
}

TEST_CASE("norm never grows under undriven evolution") {
  for (int trial = 0; trial < 6; ++trial) {
    const double d = uniform(0.15, 0.6);
    const Lattice lat = build_square_lattice(5, 4, d, circular_dipole());
    const CouplingMatrix cm = coupling_matrix(lat);
    const PatternKind kinds[] = {PatternKind::uniform, PatternKind::checkerboard, PatternKind::stripe_x,
                                 PatternKind::stripe_y};
    const auto pat = preset_pattern(kinds[trial % 4], {cplx(uniform(-5, 5), 0.0)});
    RealSpaceState s;
    s.e = random_state(lat.size());
    const Trajectory tr = evolve_real_space(lat, cm, {pat}, std::nullopt, s, 3.0, 0.005);
    for (std::size_t i = 1; i < tr.count(); ++i) REQUIRE(tr.norm_at(i) <= tr.norm_at(i - 1) * (1.0 + 1e-12));
  }
}

TEST_CASE("RK4 converges at fourth order") {
  const Lattice lat = build_square_lattice(4, 3, 0.25, circular_dipole());
  const CouplingMatrix cm = coupling_matrix(lat);
  const auto pat = preset_pattern(PatternKind::checkerboard, {cplx(3.0, 0.0)})
                       .with_envelope([](double t) { return std::cos(2.0 * t); });
  RealSpaceState s;
  s.e = random_state(lat.size());
  auto final_state = [&](double dt) {
    return evolve_real_space(lat, cm, {pat}, std::nullopt, s, 2.0, dt, {.keep_history = false}).states.back();
  };
  const CVector ref = final_state(0.000625);
  const double e1 = (final_state(0.01) - ref).norm();
  const double e2 = (final_state(0.005) - ref).norm();
  const double e3 = (final_state(0.0025) - ref).norm();
  const double order1 = std::log2(e1 / e2);
  const double order2 = std::log2(e2 / e3);
  CAPTURE(e1);
  CAPTURE(e2);
  CAPTURE(e3);
  CHECK(order1 > 3.7);
  CHECK(order2 > 3.7);
  CHECK(order1 < 4.3);
}

TEST_CASE("pattern samples are real for arbitrary valid parameters") {
  const PatternKind kinds[] = {PatternKind::uniform,  PatternKind::checkerboard, PatternKind::stripe_x,
                               PatternKind::stripe_y, PatternKind::period3_x,    PatternKind::period4_x,
                               PatternKind::period3_y, PatternKind::period4_y};
  for (int trial = 0; trial < 40; ++trial) {
    const PatternKind kind = kinds[trial % 8];
    std::vector<cplx> params;
    for (std::size_t i = 0; i < pattern_param_count(kind); ++i) {
      const bool real_slot = i == 0 || i == 2;
      params.emplace_back(uniform(-4, 4), real_slot ? 0.0 : uniform(-4, 4));
    }
    const DetuningPattern p = preset_pattern(kind, params);
    const Lattice lat = build_square_lattice(7, 8, 0.3, circular_dipole());
    for (int j = 0; j < lat.size(); ++j) {
      double v = 0.0;
      REQUIRE_NOTHROW(v = p.value(lat.site(j)));
      CHECK(std::isfinite(v));
    }
    // The same synthesis from the raw components must have a vanishing imaginary part.
    for (int j = 0; j < lat.size(); ++j) {
      cplx sum = 0.0;
      for (const auto& c : p.components()) {
        const double ph = 2.0 * kPi *
                          (static_cast<double>(c.qx) * lat.site(j).nx / p.period_x() +
                           static_cast<double>(c.qy) * lat.site(j).ny / p.period_y());
        sum += c.amplitude * std::polar(1.0, ph);
      }
      CHECK(std::abs(sum.imag()) < 1e-12 * (1.0 + std::abs(sum)));
      CHECK(sum.real() == doctest::Approx(p.value(lat.site(j))).epsilon(1e-12));
    }
  }
  CHECK(!realness_diagnostics({{1, 0, cplx(1.0, 0.0)}}, 3, 1).empty());
  CHECK(realness_diagnostics({{1, 0, cplx(1.0, 2.0)}, {2, 0, cplx(1.0, -2.0)}}, 3, 1).empty());
}

TEST_CASE("CLI outputs are byte-identical across runs and thread counts") {
  const fs::path a = cli_support::fresh_dir("det-a");
  const fs::path b = cli_support::fresh_dir("det-b");
  const std::string args = "retrieve --nx 7 --ny 7 --waist-sweep 2:3:0.5 --t-max 500";
  const auto ra = cli_support::run(args + " --threads 1 --output-dir " + a.string());
  const auto rb = cli_support::run(args + " --threads 3 --output-dir " + b.string());
  REQUIRE_MESSAGE(ra.code == 0, ra.out);
  REQUIRE_MESSAGE(rb.code == 0, rb.out);
  const fs::path ca = cli_support::only_file(a, ".csv");
  const fs::path cb = cli_support::only_file(b, ".csv");
  CHECK(ca.filename() == cb.filename());
  CHECK(cli_support::slurp(ca) == cli_support::slurp(cb));

  const fs::path c = cli_support::fresh_dir("det-c");
  const auto rc = cli_support::run("bands --samples 6 --truncation 30 --output-dir " + c.string());
  const auto rd = cli_support::run("bands --samples 6 --truncation 30 --output-dir " + c.string());
  REQUIRE(rc.code == 0);
  REQUIRE(rd.code == 0);
  CHECK(rc.out == rd.out);
}
