#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "darklattice/core.hpp"

namespace darklattice {

struct BandVertex {
  std::string label;
  Vec2 k = Vec2::Zero();
};

struct BandPath {
  std::vector<BandVertex> vertices;
  int samples_per_segment = 50;
};

struct Branch {
  double shift = 0.0;
  double decay = 0.0;
};

struct BandPoint {
  double path_fraction = 0.0;
  Vec2 k = Vec2::Zero();
  std::vector<Branch> branches;
};

// High-symmetry labels: G (or Gamma), X, Y, M, and primed variants X', M' on the
// negative axes, all in the first zone of a square lattice of the given spacing.
Vec2 symmetry_point(const std::string& label, double spacing);
BandPath make_band_path(const std::vector<std::string>& labels, double spacing, int samples_per_segment);

// Sample positions along the path; the last vertex is included once.
std::vector<std::pair<double, Vec2>> sample_path(const BandPath& path, double spacing);

std::vector<BandPoint> band_path_bravais(const BandPath& path, double spacing, const CVec3& dipole,
                                         double truncation_radius, bool folded = false);

std::vector<BandPoint> band_path_checkerboard(const BandPath& path, double spacing, double Delta,
                                              const CVec3& dipole, double truncation_radius);

// Two branches of the checkerboard problem at one k, sorted by shift.
std::vector<Branch> checkerboard_branches(const Vec2& k, double spacing, double Delta,
                                          const CVec3& dipole, double truncation_radius);

enum class CurvatureDirection { M_Gamma, M_X };

// d^2 J / dk^2 at M along the direction, k in units of 1/lambda0 (result in gamma0 lambda0^2).
double curvature_at_M(double spacing, CurvatureDirection direction, const CVec3& dipole,
                      double truncation_radius, double step_fraction = 1e-3);

void write_bands_csv(std::ostream& os, const std::vector<BandPoint>& points,
                     const std::string& comment = {});

}  // namespace darklattice
