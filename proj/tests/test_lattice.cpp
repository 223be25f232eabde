#include <doctest.h>

#include <cmath>
#include <random>

#include "darklattice/lattice.hpp"
#include "darklattice/pattern.hpp"

using namespace darklattice;

TEST_CASE("odd lattice is centred with integer labels") {
  const auto lat = build_square_lattice(5, 3, 0.3, circular_dipole());
  CHECK(lat.size() == 15);
  CHECK(lat.site(0) == Site{-2, -1});
  CHECK(lat.site(14) == Site{2, 1});
  // grid index g = ix * ny + iy
  CHECK(lat.site(4) == Site{-1, 0});
  Vec3 sum = Vec3::Zero();
  for (const auto& r : lat.positions()) sum += r;
  CHECK(sum.norm() < 1e-12);
  CHECK(lat.position(7).norm() < 1e-15);
  CHECK(lat.find(Vec3(0.6, -0.3, 0.0)) == 12);
  CHECK(lat.find(Vec3(0.65, 0.0, 0.0)) == -1);
}

TEST_CASE("even lattice sits between labels") {
  const auto lat = build_square_lattice(4, 4, 0.5, circular_dipole());
  CHECK(lat.site(0) == Site{-2, -2});
  CHECK(lat.site(15) == Site{1, 1});
  CHECK(lat.position(0).x() == doctest::Approx(-0.75));
  CHECK(lat.position(15).y() == doctest::Approx(0.75));
}

TEST_CASE("dipole is normalised and bad input rejected") {
  const auto lat = build_square_lattice(2, 2, 0.2, CVec3(2.0, 0.0, 0.0));
  CHECK(lat.dipole().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_square_lattice(0, 3, 0.2, circular_dipole()), Error);
  CHECK_THROWS_AS(build_square_lattice(3, 3, -0.1, circular_dipole()), Error);
  CHECK_THROWS_AS(build_square_lattice(3, 3, 0.1, CVec3::Zero()), Error);
  try {
    build_square_lattice(3, 3, 0.0, circular_dipole());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
}

TEST_CASE("defects remove sites and keep grid bookkeeping") {
  const auto base = build_square_lattice(5, 5, 0.3, circular_dipole());
  const auto lat = apply_defects(base, {{0, 0}, {2, -1}});
  CHECK(lat.size() == 23);
  CHECK(lat.defects().size() == 2);
  CHECK(lat.find(Vec3(0, 0, 0)) == -1);
  CHECK(lat.find(Vec3(0.3, 0, 0)) >= 0);
  for (int j = 0; j < lat.size(); ++j) CHECK((lat.position_of_grid(lat.grid_indices()[j]) - lat.position(j)).norm() < 1e-15);
  CHECK_THROWS_AS(apply_defects(base, {{3, 0}}), Error);
  CHECK_THROWS_AS(apply_defects(base, {{1, 1}, {1, 1}}), Error);
  CHECK_THROWS_AS(apply_defects(base, {{0.5, 0}}), Error);
}

TEST_CASE("preset patterns match their closed forms") {
  const auto lat = build_square_lattice(7, 7, 0.3, circular_dipole());
  const auto cb = preset_pattern(PatternKind::checkerboard, {cplx(2.0, 0.0)});
  const auto sx = preset_pattern(PatternKind::stripe_x, {cplx(1.5, 0.0)});
  const auto sy = preset_pattern(PatternKind::stripe_y, {cplx(1.5, 0.0)});
  const cplx beta(0.3, -0.7);
  const auto p3 = preset_pattern(PatternKind::period3_x, {cplx(0.2, 0.0), beta});
  const cplx b4(0.5, 0.5), d4(0.4, 0.0);
  const auto p4 = preset_pattern(PatternKind::period4_y, {cplx(0.1, 0.0), b4, d4});
  for (int j = 0; j < lat.size(); ++j) {
    const Site s = lat.site(j);
    const double sgn = ((s.nx + s.ny) % 2 == 0) ? 1.0 : -1.0;
    CHECK(cb.value(s) == doctest::Approx(2.0 * sgn));
    CHECK(sx.value(s) == doctest::Approx(1.5 * ((s.nx % 2 == 0) ? 1.0 : -1.0)));
    CHECK(sy.value(s) == doctest::Approx(1.5 * ((s.ny % 2 == 0) ? 1.0 : -1.0)));
    const double ph3 = 2.0 * kPi * s.nx / 3.0;
    CHECK(p3.value(s) == doctest::Approx(0.2 + 2.0 * (beta * cplx(std::cos(ph3), std::sin(ph3))).real()));
    const double ph4 = kPi * s.ny / 2.0;
    const double expect = 0.1 + 2.0 * (b4 * cplx(std::cos(ph4), std::sin(ph4))).real() + 0.4 * std::cos(kPi * s.ny);
    CHECK(p4.value(s) == doctest::Approx(expect));
  }
}

TEST_CASE("pattern quasimomenta and envelopes") {
  const auto cb = preset_pattern(PatternKind::checkerboard, {cplx(1.0, 0.0)});
  const Vec2 q = cb.quasimomentum(cb.components()[0], 0.25);
  CHECK(q.x() == doctest::Approx(kPi / 0.25));
  CHECK(q.y() == doctest::Approx(kPi / 0.25));
  const auto env = cb.with_envelope([](double t) { return std::cos(t); });
  CHECK(env.has_envelope());
  CHECK(env.sample({0, 0}, kPi) == doctest::Approx(-1.0));
  const auto lat = build_square_lattice(3, 3, 0.25, circular_dipole());
  CHECK(sample_detuning(env, lat, lat.position(0), 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sample_detuning(env, lat, Vec3(0.1, 0, 0), 0.0), Error);
}

TEST_CASE("realness is enforced") {
  // Q = (pi, pi) is its own conjugate, so its amplitude must be real.
  CHECK_FALSE(realness_diagnostics({{1, 1, cplx(1.0, 0.2)}}, 2, 2).empty());
  CHECK(realness_diagnostics({{1, 1, cplx(1.0, 0.0)}}, 2, 2).empty());
  // Period-4 harmonic without its conjugate partner.
  CHECK_FALSE(realness_diagnostics({{1, 0, cplx(0.5, 0.5)}, {3, 0, cplx(0.5, 0.5)}}, 4, 1).empty());
  CHECK(realness_diagnostics({{1, 0, cplx(0.5, 0.5)}, {3, 0, cplx(0.5, -0.5)}}, 4, 1).empty());
  CHECK_THROWS_AS(DetuningPattern({{1, 0, cplx(1.0, 0.0)}}, 3, 1), Error);
  CHECK_THROWS_AS(preset_pattern(PatternKind::checkerboard, {cplx(1.0, 0.1)}), Error);
  CHECK_THROWS_AS(preset_pattern(PatternKind::period4_x, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(parse_pattern_kind("hexagonal"), Error);
  CHECK(parse_pattern_kind("period3_y") == PatternKind::period3_y);
}
