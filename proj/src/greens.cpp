#include "darklattice/greens.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "darklattice/parallel.hpp"

namespace darklattice {

GreensTensor green_tensor(const Vec3& r, double k0) {
  const double R = r.norm();
  if (!(R > 0.0)) fail(ErrorKind::domain, "green_tensor: r = 0 (self term is handled by convention)");
  const double kr = k0 * R;
  const cplx I(0.0, 1.0);
  const cplx pref = std::exp(I * kr) / (4.0 * kPi * R);
  const cplx a = 1.0 + I / kr - 1.0 / (kr * kr);
  const cplx b = -1.0 - 3.0 * I / kr + 3.0 / (kr * kr);
  const Vec3 u = r / R;
  GreensTensor G = (b * pref) * (u * u.transpose()).cast<cplx>();
  G.diagonal().array() += a * pref;
  return G;
}

cplx coupling_value(const Vec3& r, const CVec3& dipole, double k0) {
  const double R = r.norm();
  if (!(R > 0.0)) fail(ErrorKind::domain, "coupling between coincident positions");
  const double kr = k0 * R;
  const cplx I(0.0, 1.0);
  const cplx pref = std::exp(I * kr) / (4.0 * kPi * R);
  const cplx a = 1.0 + I / kr - 1.0 / (kr * kr);
  const cplx b = -1.0 - 3.0 * I / kr + 3.0 / (kr * kr);
  const cplx proj = (r / R).cast<cplx>().dot(dipole);  // conj(u).d with u real
  const double p = dipole.squaredNorm();
  return -(3.0 * kPi / k0) * pref * (a * p + b * std::norm(proj));
}

PairCoupling pair_coupling(const Vec3& ri, const Vec3& rj, const CVec3& dipole, double k0) {
  const cplx v = coupling_value(rj - ri, dipole, k0);
  return {v.real(), -2.0 * v.imag()};
}

CouplingMatrix::CouplingMatrix(CMatrix m) : m_(std::move(m)) {
  const int n = size();
  if (n == 0) return;
  const Eigen::MatrixXd G = -2.0 * m_.imag();
  if (n <= 2000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    gamma_max_ = std::max(es.eigenvalues().maxCoeff(), 1.0);
    return;
  }
  // Power iteration from a start vector without lattice symmetry.
  RVector x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.7 * i + 0.3);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    const RVector y = G * x;
    lambda = x.dot(y);
    const double ny = y.norm();
    if (!(ny > 0.0)) break;
    x = y / ny;
  }
  gamma_max_ = std::max(lambda, 1.0);
}

CouplingMatrix coupling_matrix(const Lattice& lattice) {
  const int n = lattice.size();
  if (n < 1) fail(ErrorKind::invalid_input, "coupling_matrix: empty lattice");
  CMatrix m(n, n);
  const auto& pos = lattice.positions();
  const CVec3& dip = lattice.dipole();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < n; ++i) {
      m(i, j) = i == j ? cplx(0.0, -0.5 * kGamma0) : coupling_value(pos[i] - pos[j], dip);
    }
  });
  // Enforce exact symmetry; the two evaluations differ only by rounding.
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) m(j, i) = m(i, j);
  return CouplingMatrix(std::move(m));
}

double taper_weight(double s) {
  constexpr double s0 = 0.5;
  if (s <= s0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double x = (s - s0) / (1.0 - s0);
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double a = f(1.0 - x);
  const double b = f(x);
  return a / (a + b);
}

bool in_first_zone(const Vec2& k, double spacing, double tol) {
  const double edge = kPi / spacing * (1.0 + tol);
  return std::abs(k.x()) <= edge && std::abs(k.y()) <= edge;
}

Vec2 wrap_to_zone(const Vec2& k, double spacing) {
  const double g = 2.0 * kPi / spacing;
  auto w = [&](double v) {
    double r = std::fmod(v + 0.5 * g, g);
    if (r < 0.0) r += g;
    return r - 0.5 * g;
  };
  return {w(k.x()), w(k.y())};
}

namespace {

using Key = std::array<long long, 10>;

long long quant(double v) { return std::llround(v * 1e12); }

// Half-disk of sites (inversion partners folded in) with tapered couplings.
struct SumTable {
  std::vector<double> x, y;
  std::vector<cplx> c;
};

std::mutex table_mutex;
std::map<Key, std::shared_ptr<const SumTable>> table_cache;

std::shared_mutex disp_mutex;
std::map<Key, Dispersion> disp_cache;

Key table_key(double spacing, const CVec3& d, double R) {
  return {quant(spacing),         quant(R),
          quant(d[0].real()),     quant(d[0].imag()),
          quant(d[1].real()),     quant(d[1].imag()),
          quant(d[2].real()),     quant(d[2].imag()),
          0,                      0};
}

std::shared_ptr<const SumTable> sum_table(double spacing, const CVec3& dipole, double R) {
  const Key key = table_key(spacing, dipole, R);
  std::lock_guard<std::mutex> lock(table_mutex);
  auto it = table_cache.find(key);
  if (it != table_cache.end()) return it->second;
  auto t = std::make_shared<SumTable>();
  const int m = static_cast<int>(std::ceil(R / spacing)) + 1;
  for (int a = 0; a <= m; ++a) {
    for (int b = -m; b <= m; ++b) {
      if (a == 0 && b <= 0) continue;
      const Vec3 r(a * spacing, b * spacing, 0.0);
      const double w = taper_weight(r.norm() / R);
      if (w == 0.0) continue;
      t->x.push_back(r.x());
      t->y.push_back(r.y());
      t->c.push_back(2.0 * w * coupling_value(r, dipole));
    }
  }
  std::shared_ptr<const SumTable> out = t;
  table_cache.emplace(key, out);
  return out;
}

}  // namespace

Dispersion dispersion(const Vec2& k, double spacing, const CVec3& dipole_in,
                      double truncation_radius) {
  if (!(spacing > 0.0)) fail(ErrorKind::invalid_input, "dispersion: spacing must be positive");
  if (!in_first_zone(k, spacing)) {
    std::ostringstream os;
    os << "dispersion: k = (" << k.x() << ", " << k.y() << ") outside the first Brillouin zone";
    fail(ErrorKind::invalid_input, os.str());
  }
  if (truncation_radius < 20.0 * spacing * (1.0 - 1e-12))
    fail(ErrorKind::invalid_input, "dispersion: truncation radius must be >= 20 spacings");
  const double dn = dipole_in.norm();
  if (!(dn > 0.0)) fail(ErrorKind::invalid_input, "dispersion: zero dipole");
  const CVec3 dipole = dipole_in / dn;

  Key key = table_key(spacing, dipole, truncation_radius);
  key[8] = quant(k.x());
  key[9] = quant(k.y());
  {
    std::shared_lock<std::shared_mutex> lock(disp_mutex);
    auto it = disp_cache.find(key);
    if (it != disp_cache.end()) return it->second;
  }
  auto table = sum_table(spacing, dipole, truncation_radius);
  cplx s(0.0, -0.5 * kGamma0);
  const std::size_t n = table->c.size();
  for (std::size_t i = 0; i < n; ++i) s += std::cos(k.x() * table->x[i] + k.y() * table->y[i]) * table->c[i];
  Dispersion out{k, s.real(), -2.0 * s.imag()};
  {
    std::unique_lock<std::shared_mutex> lock(disp_mutex);
    // First writer wins so every reader sees a single value per key.
    auto it = disp_cache.emplace(key, out).first;
    return it->second;
  }
}

std::size_t dispersion_cache_size() {
  std::shared_lock<std::shared_mutex> lock(disp_mutex);
  return disp_cache.size();
}

void clear_dispersion_cache() {
  std::unique_lock<std::shared_mutex> lock(disp_mutex);
  disp_cache.clear();
}

}  // namespace darklattice
