#include "darklattice/bands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "darklattice/greens.hpp"
#include "darklattice/io.hpp"
#include "darklattice/parallel.hpp"

namespace darklattice {

Vec2 symmetry_point(const std::string& label, double spacing) {
  const double p = kPi / spacing;
  if (label == "G" || label == "Gamma") return {0.0, 0.0};
  if (label == "X") return {p, 0.0};
  if (label == "Y") return {0.0, p};
  if (label == "M") return {p, p};
  // Corner and edge midpoint of the checkerboard (folded) zone.
  if (label == "M'") return {p, 0.0};
  if (label == "X'") return {0.5 * p, 0.5 * p};
  fail(ErrorKind::invalid_input, "unknown symmetry point '" + label + "'");
}

BandPath make_band_path(const std::vector<std::string>& labels, double spacing,
                        int samples_per_segment) {
  if (labels.size() < 2) fail(ErrorKind::invalid_input, "band path needs at least two vertices");
  if (samples_per_segment < 1) fail(ErrorKind::invalid_input, "samples per segment must be >= 1");
  BandPath path;
  path.samples_per_segment = samples_per_segment;
  for (const auto& l : labels) path.vertices.push_back({l, symmetry_point(l, spacing)});
  return path;
}

std::vector<std::pair<double, Vec2>> sample_path(const BandPath& path, double spacing) {
  if (path.vertices.size() < 2) fail(ErrorKind::invalid_input, "band path needs at least two vertices");
  for (const auto& v : path.vertices)
    if (!in_first_zone(v.k, spacing))
      fail(ErrorKind::invalid_input, "band path vertex '" + v.label + "' outside the first zone");
  std::vector<double> seg;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    seg.push_back((path.vertices[i + 1].k - path.vertices[i].k).norm());
    total += seg.back();
  }
  std::vector<std::pair<double, Vec2>> out;
  double acc = 0.0;
  const int n = path.samples_per_segment;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const Vec2& a = path.vertices[i].k;
    const Vec2& b = path.vertices[i + 1].k;
    for (int s = 0; s < n; ++s) {
      const double f = static_cast<double>(s) / n;
      out.emplace_back(total > 0 ? (acc + f * seg[i]) / total : 0.0, a + f * (b - a));
    }
    acc += seg[i];
  }
  out.emplace_back(1.0, path.vertices.back().k);
  return out;
}

namespace {

void sort_branches(std::vector<Branch>& b) {
  std::sort(b.begin(), b.end(), [](const Branch& x, const Branch& y) {
    return x.shift != y.shift ? x.shift < y.shift : x.decay < y.decay;
  });
}

// Sublattice sums. A holds the sites with even nx + ny, spanned by
// a1 = (d, d), a2 = (d, -d); B is A shifted by b = (d, 0).
struct SublatticeTable {
  std::vector<Vec2> intra_r, plus_r, minus_r;
  std::vector<cplx> intra_c, plus_c, minus_c;
};

std::mutex sub_mutex;
std::map<std::array<long long, 8>, std::shared_ptr<const SublatticeTable>> sub_cache;

std::shared_ptr<const SublatticeTable> sublattice_table(double d, const CVec3& dip, double R) {
  auto q = [](double v) { return std::llround(v * 1e12); };
  const std::array<long long, 8> key = {q(d), q(R), q(dip[0].real()), q(dip[0].imag()),
                                        q(dip[1].real()), q(dip[1].imag()), q(dip[2].real()),
                                        q(dip[2].imag())};
  std::lock_guard<std::mutex> lock(sub_mutex);
  auto it = sub_cache.find(key);
  if (it != sub_cache.end()) return it->second;
  auto t = std::make_shared<SublatticeTable>();
  const Vec2 b(d, 0.0);
  const int m = static_cast<int>(std::ceil(R / d)) + 2;
  auto add = [&](const Vec2& R2, const Vec2& r, std::vector<Vec2>& rs, std::vector<cplx>& cs) {
    const double w = taper_weight(r.norm() / R);
    if (w == 0.0) return;
    rs.push_back(R2);
    cs.push_back(w * coupling_value(Vec3(r.x(), r.y(), 0.0), dip));
  };
  for (int m1 = -m; m1 <= m; ++m1) {
    for (int m2 = -m; m2 <= m; ++m2) {
      const Vec2 Rv((m1 + m2) * d, (m1 - m2) * d);
      if (m1 != 0 || m2 != 0) add(Rv, Rv, t->intra_r, t->intra_c);
      add(Rv, Rv + b, t->plus_r, t->plus_c);
      add(Rv, Rv - b, t->minus_r, t->minus_c);
    }
  }
  std::shared_ptr<const SublatticeTable> out = t;
  sub_cache.emplace(key, out);
  return out;
}

cplx bloch_sum(const Vec2& k, const std::vector<Vec2>& rs, const std::vector<cplx>& cs) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double ph = k.dot(rs[i]);
    s += cplx(std::cos(ph), std::sin(ph)) * cs[i];
  }
  return s;
}

}  // namespace

std::vector<Branch> checkerboard_branches(const Vec2& k, double spacing, double Delta,
                                          const CVec3& dipole, double R) {
  if (!in_first_zone(k, spacing)) fail(ErrorKind::invalid_input, "k outside the first Brillouin zone");
  if (R < 20.0 * spacing * (1.0 - 1e-12))
    fail(ErrorKind::invalid_input, "truncation radius must be >= 20 spacings");
  const CVec3 dip = dipole / dipole.norm();
  auto t = sublattice_table(spacing, dip, R);
  const cplx c11 = bloch_sum(k, t->intra_r, t->intra_c);
  const cplx c12 = bloch_sum(k, t->plus_r, t->plus_c);
  const cplx c21 = bloch_sum(k, t->minus_r, t->minus_c);
  const cplx self(0.0, -0.5 * kGamma0);
  Eigen::Matrix2cd M;
  M << self - Delta + c11, c12, c21, self + Delta + c11;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(M, false);
  std::vector<Branch> out;
  for (int i = 0; i < 2; ++i) out.push_back({es.eigenvalues()[i].real(), -2.0 * es.eigenvalues()[i].imag()});
  sort_branches(out);
  return out;
}

std::vector<BandPoint> band_path_bravais(const BandPath& path, double spacing, const CVec3& dipole,
                                         double R, bool folded) {
  const auto samples = sample_path(path, spacing);
  std::vector<BandPoint> out(samples.size());
  const Vec2 shift(kPi / spacing, kPi / spacing);
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto& [f, k] = samples[i];
    BandPoint p{f, k, {}};
    const Dispersion a = dispersion(k, spacing, dipole, R);
    p.branches.push_back({a.J, a.Gamma});
    if (folded) {
      const Dispersion b = dispersion(wrap_to_zone(k + shift, spacing), spacing, dipole, R);
      p.branches.push_back({b.J, b.Gamma});
      sort_branches(p.branches);
    }
    out[i] = std::move(p);
  });
  return out;
}

std::vector<BandPoint> band_path_checkerboard(const BandPath& path, double spacing, double Delta,
                                              const CVec3& dipole, double R) {
  if (Delta < 0.0) fail(ErrorKind::invalid_input, "checkerboard bands need Delta >= 0");
  const auto samples = sample_path(path, spacing);
  std::vector<BandPoint> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const auto& [f, k] = samples[i];
    out[i] = BandPoint{f, k, checkerboard_branches(k, spacing, Delta, dipole, R)};
  });
  return out;
}

double curvature_at_M(double spacing, CurvatureDirection direction, const CVec3& dipole, double R,
                      double step_fraction) {
  if (!(spacing > 0.0) || spacing >= kLambda0 / std::sqrt(2.0))
    fail(ErrorKind::invalid_input, "curvature_at_M needs 0 < spacing < lambda0/sqrt(2)");
  const double p = kPi / spacing;
  const Vec2 M(p, p);
  const Vec2 u = direction == CurvatureDirection::M_Gamma ? Vec2(1.0, 1.0).normalized() : Vec2(1.0, 0.0);
  const double h = step_fraction * p;
  auto J = [&](double s) { return dispersion(wrap_to_zone(M + s * u, spacing), spacing, dipole, R).J; };
  return (J(h) - 2.0 * J(0.0) + J(-h)) / (h * h);
}

void write_bands_csv(std::ostream& os, const std::vector<BandPoint>& points,
                     const std::string& comment) {
  CsvWriter w(os, {"k_path_fraction", "kx", "ky", "branch_index", "shift", "decay"}, comment);
  for (const auto& p : points)
    for (std::size_t b = 0; b < p.branches.size(); ++b)
      w.row({p.path_fraction, p.k.x(), p.k.y(), static_cast<double>(b), p.branches[b].shift,
             p.branches[b].decay});
}

}  // namespace darklattice
