#include <doctest.h>

#include <cmath>
#include <string>

#include "darklattice/protocols.hpp"

using namespace darklattice;

namespace {

constexpr double d = 0.4;

const Lattice& lattice() {
  static const Lattice lat = build_square_lattice(61, 61, d, circular_dipole());
  return lat;
}

const CouplingMatrix& coupling() {
  static const CouplingMatrix cm = coupling_matrix(lattice());
  return cm;
}

// True when the recorded maxima step forward (+1) or backward (-1) through the states.
bool cycles(const std::vector<int>& order, int states, int direction, std::size_t at_least) {
  if (order.size() < at_least) return false;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (order[i + 1] != ((order[i] + direction) % states + states) % states) return false;
  return order.front() == 0;
}

std::string show(const std::vector<int>& order) {
  std::string s;
  for (int o : order) s += std::to_string(o) + " ";
  return s;
}

}  // namespace

TEST_CASE("three dark states exchange population cyclically") {
  const std::vector<Vec2> ks{{kPi / d, 0.0}, {kPi / d, 2.0 * kPi / (3.0 * d)}, {kPi / d, -2.0 * kPi / (3.0 * d)}};
  const std::vector<std::string> labels{"(pi,0)", "(pi,2pi/3)", "(pi,-2pi/3)"};
  const auto minus = preset_pattern(PatternKind::period3_y, {0.0, cplx(0.0, -5.0)});
  const CycleResult a = cycle_experiment(lattice(), coupling(), minus, ks, labels, 16.0 * d, 2.0, 0.01, 2);
  CHECK_MESSAGE(cycles(a.order, 3, +1, 6), show(a.order));

  const auto plus = preset_pattern(PatternKind::period3_y, {0.0, cplx(0.0, 5.0)});
  const CycleResult b = cycle_experiment(lattice(), coupling(), plus, ks, labels, 16.0 * d, 2.0, 0.01, 2);
  CHECK_MESSAGE(cycles(b.order, 3, -1, 6), show(b.order));

  // Population stays in the three targeted states.
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double sum = a.populations[0][i] + a.populations[1][i] + a.populations[2][i];
    CHECK(sum > 0.95);
  }
}

TEST_CASE("four dark states exchange population cyclically") {
  const std::vector<Vec2> ks{{kPi / d, 0.0}, {kPi / d, kPi / (2.0 * d)}, {kPi / d, kPi / d}, {kPi / d, -kPi / (2.0 * d)}};
  const std::vector<std::string> labels{"(pi,0)", "(pi,pi/2)", "(pi,pi)", "(pi,-pi/2)"};
  const auto pat = preset_pattern(PatternKind::period4_y, {0.0, std::polar(5.0 * std::sqrt(2.0), kPi / 4.0), 5.0});
  const CycleResult r = cycle_experiment(lattice(), coupling(), pat, ks, labels, 16.0 * d, 2.0, 0.005, 4);
  CHECK_MESSAGE(cycles(r.order, 4, +1, 6), show(r.order));
}
