#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "darklattice/bands.hpp"
#include "darklattice/greens.hpp"

using namespace darklattice;

TEST_CASE("symmetry points and path sampling") {
  const double d = 0.2;
  CHECK(symmetry_point("G", d).norm() == 0.0);
  CHECK(symmetry_point("Gamma", d).norm() == 0.0);
  CHECK(symmetry_point("X", d).x() == doctest::Approx(kPi / d));
  CHECK(symmetry_point("M", d).y() == doctest::Approx(kPi / d));
  CHECK_THROWS_AS(symmetry_point("K", d), Error);
  const auto path = make_band_path({"G", "X", "M"}, d, 10);
  const auto s = sample_path(path, d);
  CHECK(s.size() == 21);
  CHECK(s.front().first == 0.0);
  CHECK(s.back().first == doctest::Approx(1.0));
  CHECK((s.back().second - symmetry_point("M", d)).norm() < 1e-12);
  CHECK((s[10].second - symmetry_point("X", d)).norm() < 1e-12);
}

TEST_CASE("checkerboard at zero detuning folds the Bravais band") {
  const double d = 0.3;
  const double R = 60.0 * d;
  const CVec3 dip = circular_dipole();
  for (const Vec2 k : {Vec2(1.0, 0.5), Vec2(4.0, -2.0), Vec2(0.5 * kPi / d, 0.5 * kPi / d)}) {
    const auto br = checkerboard_branches(k, d, 0.0, dip, R);
    REQUIRE(br.size() == 2);
    const Vec2 Q(kPi / d, kPi / d);
    const auto a = dispersion(k, d, dip, R);
    const auto b = dispersion(wrap_to_zone(k + Q, d), d, dip, R);
    std::vector<double> expect{a.J, b.J};
    std::sort(expect.begin(), expect.end());
    CHECK(br[0].shift == doctest::Approx(expect[0]).epsilon(1e-8));
    CHECK(br[1].shift == doctest::Approx(expect[1]).epsilon(1e-8));
  }
}

TEST_CASE("checkerboard trace is independent of the detuning") {
  const double d = 0.2;
  const double R = 60.0 * d;
  const CVec3 dip = circular_dipole();
  const Vec2 k(3.0, 1.0);
  const auto a = dispersion(k, d, dip, R);
  const auto b = dispersion(wrap_to_zone(k + Vec2(kPi / d, kPi / d), d), d, dip, R);
  for (double Delta : {0.5, 2.0, 10.0}) {
    const auto br = checkerboard_branches(k, d, Delta, dip, R);
    CHECK(br[0].shift + br[1].shift == doctest::Approx(a.J + b.J).epsilon(1e-9));
    CHECK(br[0].decay + br[1].decay == doctest::Approx(a.Gamma + b.Gamma).epsilon(1e-7));
    CHECK(br[1].shift - br[0].shift >= 2.0 * Delta * 0.99 - std::abs(a.J - b.J));
  }
}

TEST_CASE("bands along a path and CSV layout") {
  const double d = 0.2;
  const auto path = make_band_path({"M'", "G", "X'", "M'"}, d, 5);
  const auto pts = band_path_bravais(path, d, circular_dipole(), 40.0 * d, true);
  CHECK(pts.size() == 16);
  CHECK(pts.front().branches.size() == 2);
  const auto cb = band_path_checkerboard(path, d, 1.0, circular_dipole(), 40.0 * d);
  CHECK(cb.size() == 16);
  std::ostringstream os;
  write_bands_csv(os, pts, "config-hash: abc");
  const std::string text = os.str();
  CHECK(text.rfind("# config-hash: abc\r\n", 0) == 0);
  CHECK(text.find("k_path_fraction,kx,ky,branch_index,shift,decay\r\n") != std::string::npos);
}

TEST_CASE("curvature at M is smallest near d = 0.2") {
  const CVec3 dip = circular_dipole();
  for (auto dir : {CurvatureDirection::M_Gamma, CurvatureDirection::M_X}) {
    const double c15 = std::abs(curvature_at_M(0.15, dir, dip, 150.0 * 0.15));
    const double c20 = std::abs(curvature_at_M(0.20, dir, dip, 150.0 * 0.20));
    const double c30 = std::abs(curvature_at_M(0.30, dir, dip, 150.0 * 0.30));
    CHECK(c20 < c15);
    CHECK(c20 < c30);
  }
  CHECK_THROWS_AS(curvature_at_M(0.8, CurvatureDirection::M_X, dip, 150.0 * 0.8), Error);
}
