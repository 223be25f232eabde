#pragma once

#include <vector>

#include "darklattice/core.hpp"

namespace darklattice {

// Integer site label, centred on the origin. For even counts the labels run
// -N/2 .. N/2-1 and the site sits at (n + 1/2) d.
struct Site {
  int nx = 0;
  int ny = 0;
  bool operator==(const Site&) const = default;
};

class Lattice {
 public:
  Lattice() = default;

  double spacing() const { return spacing_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return static_cast<int>(positions_.size()); }
  const CVec3& dipole() const { return dipole_; }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(int j) const { return positions_[j]; }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(int j) const { return sites_[j]; }
  // Index into the full nx*ny grid (row-major in x) for each remaining atom.
  const std::vector<int>& grid_indices() const { return grid_index_; }
  // Removed grid indices, sorted.
  const std::vector<int>& defects() const { return defects_; }

  // Lattice index of the atom at the given position, or -1.
  int find(const Vec3& r, double tol = 1e-9) const;
  Site site_of_grid(int grid_index) const;
  Vec3 position_of_grid(int grid_index) const;

 private:
  friend Lattice build_square_lattice(int, int, double, const CVec3&);
  friend Lattice apply_defects(const Lattice&, const std::vector<Vec2>&);

  double spacing_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
  CVec3 dipole_ = CVec3::Zero();
  std::vector<Vec3> positions_;
  std::vector<Site> sites_;
  std::vector<int> grid_index_;
  std::vector<int> defects_;
};

Lattice build_square_lattice(int nx, int ny, double spacing, const CVec3& dipole);

// Holes are given in units of the spacing.
Lattice apply_defects(const Lattice& lattice, const std::vector<Vec2>& holes);

}  // namespace darklattice
