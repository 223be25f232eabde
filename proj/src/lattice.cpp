#include "darklattice/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace darklattice {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::degenerate: return "degenerate-configuration";
    case ErrorKind::instability: return "instability";
    case ErrorKind::infeasible: return "infeasible-target";
    case ErrorKind::consistency: return "internal-consistency";
    case ErrorKind::truncated_transform: return "truncated-transform";
  }
  return "unknown";
}

CVec3 circular_dipole() {
  const double s = 1.0 / std::sqrt(2.0);
  return CVec3(cplx(s, 0.0), cplx(0.0, s), cplx(0.0, 0.0));
}

namespace {

int label_offset(int n) { return n % 2 == 1 ? (n - 1) / 2 : n / 2; }

double coordinate(int i, int n, double d) { return (i - 0.5 * (n - 1)) * d; }

}  // namespace

Site Lattice::site_of_grid(int g) const {
  const int ix = g / ny_;
  const int iy = g % ny_;
  return {ix - label_offset(nx_), iy - label_offset(ny_)};
}

Vec3 Lattice::position_of_grid(int g) const {
  const int ix = g / ny_;
  const int iy = g % ny_;
  return {coordinate(ix, nx_, spacing_), coordinate(iy, ny_, spacing_), 0.0};
}

int Lattice::find(const Vec3& r, double tol) const {
  if (spacing_ <= 0.0) return -1;
  const double fx = r.x() / spacing_ + 0.5 * (nx_ - 1);
  const double fy = r.y() / spacing_ + 0.5 * (ny_ - 1);
  const long ix = std::lround(fx);
  const long iy = std::lround(fy);
  if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return -1;
  const int g = static_cast<int>(ix * ny_ + iy);
  if ((position_of_grid(g) - r).norm() > tol) return -1;
  auto it = std::lower_bound(grid_index_.begin(), grid_index_.end(), g);
  if (it == grid_index_.end() || *it != g) return -1;
  return static_cast<int>(it - grid_index_.begin());
}

Lattice build_square_lattice(int nx, int ny, double spacing, const CVec3& dipole) {
  if (nx < 1 || ny < 1) fail(ErrorKind::invalid_input, "lattice counts must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    fail(ErrorKind::invalid_input, "lattice spacing must be positive");
  const double norm = dipole.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorKind::invalid_input, "dipole vector is zero");

  Lattice lat;
  lat.spacing_ = spacing;
  lat.nx_ = nx;
  lat.ny_ = ny;
  lat.dipole_ = dipole / norm;
  const int n = nx * ny;
  lat.positions_.reserve(n);
  lat.sites_.reserve(n);
  lat.grid_index_.reserve(n);
  for (int g = 0; g < n; ++g) {
    lat.positions_.push_back(lat.position_of_grid(g));
    lat.sites_.push_back(lat.site_of_grid(g));
    lat.grid_index_.push_back(g);
  }
  return lat;
}

Lattice apply_defects(const Lattice& lattice, const std::vector<Vec2>& holes) {
  std::set<int> removed;
  for (const Vec2& h : holes) {
    const Vec3 r(h.x() * lattice.spacing(), h.y() * lattice.spacing(), 0.0);
    const int j = lattice.find(r, 1e-9 * std::max(1.0, lattice.spacing()));
    if (j < 0) {
      std::ostringstream os;
      os << "hole (" << h.x() << ", " << h.y() << ") does not match a lattice site";
      fail(ErrorKind::invalid_input, os.str());
    }
    if (!removed.insert(j).second) {
      std::ostringstream os;
      os << "hole (" << h.x() << ", " << h.y() << ") listed twice";
      fail(ErrorKind::invalid_input, os.str());
    }
  }
  if (removed.empty()) return lattice;

  Lattice out;
  out.spacing_ = lattice.spacing_;
  out.nx_ = lattice.nx_;
  out.ny_ = lattice.ny_;
  out.dipole_ = lattice.dipole_;
  std::set<int> defects(lattice.defects_.begin(), lattice.defects_.end());
  for (int j = 0; j < lattice.size(); ++j) {
    if (removed.count(j)) {
      defects.insert(lattice.grid_index_[j]);
      continue;
    }
    out.positions_.push_back(lattice.positions_[j]);
    out.sites_.push_back(lattice.sites_[j]);
    out.grid_index_.push_back(lattice.grid_index_[j]);
  }
  out.defects_.assign(defects.begin(), defects.end());
  return out;
}

}  // namespace darklattice
