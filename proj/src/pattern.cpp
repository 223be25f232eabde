#include "darklattice/pattern.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace darklattice {

namespace {

int wrap(int q, int n) { return ((q % n) + n) % n; }

double phase_of(int q, int n, int period) {
  // Reduce before converting so large labels keep full precision.
  const long m = (static_cast<long>(q) * n) % period;
  return 2.0 * kPi * static_cast<double>(m) / static_cast<double>(period);
}

}  // namespace

std::vector<std::string> realness_diagnostics(const std::vector<FourierComponent>& components,
                                              int period_x, int period_y) {
  std::vector<std::string> out;
  if (period_x < 1 || period_y < 1) {
    out.push_back("pattern period must be >= 1 along both axes");
    return out;
  }
  std::map<std::pair<int, int>, cplx> table;
  for (const auto& c : components) {
    const auto key = std::make_pair(wrap(c.qx, period_x), wrap(c.qy, period_y));
    if (table.count(key)) {
      std::ostringstream os;
      os << "pattern component (" << key.first << ", " << key.second << ") listed twice";
      out.push_back(os.str());
      continue;
    }
    table[key] = c.amplitude;
  }
  for (const auto& [key, amp] : table) {
    const auto partner = std::make_pair(wrap(period_x - key.first, period_x),
                                        wrap(period_y - key.second, period_y));
    auto it = table.find(partner);
    const cplx other = it == table.end() ? cplx(0.0, 0.0) : it->second;
    if (std::abs(other - std::conj(amp)) > 1e-12) {
      std::ostringstream os;
      os << "pattern realness violated: component (" << key.first << ", " << key.second
         << ") has amplitude (" << amp.real() << ", " << amp.imag() << ") but its partner ("
         << partner.first << ", " << partner.second << ") has (" << other.real() << ", "
         << other.imag() << ")";
      out.push_back(os.str());
    }
  }
  return out;
}

DetuningPattern::DetuningPattern(std::vector<FourierComponent> components, int period_x,
                                 int period_y, Envelope envelope)
    : period_x_(period_x), period_y_(period_y), envelope_(std::move(envelope)) {
  auto diags = realness_diagnostics(components, period_x, period_y);
  if (!diags.empty()) fail(ErrorKind::invalid_input, diags.front());
  for (auto& c : components) {
    c.qx = wrap(c.qx, period_x);
    c.qy = wrap(c.qy, period_y);
  }
  components_ = std::move(components);
}

DetuningPattern DetuningPattern::with_envelope(Envelope envelope) const {
  DetuningPattern p = *this;
  p.envelope_ = std::move(envelope);
  return p;
}

double DetuningPattern::value(const Site& n) const {
  cplx sum(0.0, 0.0);
  double scale = 1.0;
  for (const auto& c : components_) {
    const double ph = phase_of(c.qx, n.nx, period_x_) + phase_of(c.qy, n.ny, period_y_);
    sum += c.amplitude * cplx(std::cos(ph), std::sin(ph));
    scale += std::abs(c.amplitude);
  }
  if (std::abs(sum.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "detuning at site (" << n.nx << ", " << n.ny << ") has imaginary residue " << sum.imag();
    fail(ErrorKind::consistency, os.str());
  }
  return sum.real();
}

Vec2 DetuningPattern::quasimomentum(const FourierComponent& c, double spacing) const {
  return {2.0 * kPi * c.qx / (period_x_ * spacing), 2.0 * kPi * c.qy / (period_y_ * spacing)};
}

std::vector<double> DetuningPattern::site_values(const Lattice& lattice) const {
  std::vector<double> out(lattice.size());
  for (int j = 0; j < lattice.size(); ++j) out[j] = value(lattice.site(j));
  return out;
}

PatternKind parse_pattern_kind(const std::string& name) {
  static const std::map<std::string, PatternKind> kinds = {
      {"uniform", PatternKind::uniform},     {"checkerboard", PatternKind::checkerboard},
      {"stripe_x", PatternKind::stripe_x},   {"stripe_y", PatternKind::stripe_y},
      {"period3_x", PatternKind::period3_x}, {"period4_x", PatternKind::period4_x},
      {"period3_y", PatternKind::period3_y}, {"period4_y", PatternKind::period4_y},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) fail(ErrorKind::invalid_input, "unknown pattern kind '" + name + "'");
  return it->second;
}

std::string to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::uniform: return "uniform";
    case PatternKind::checkerboard: return "checkerboard";
    case PatternKind::stripe_x: return "stripe_x";
    case PatternKind::stripe_y: return "stripe_y";
    case PatternKind::period3_x: return "period3_x";
    case PatternKind::period4_x: return "period4_x";
    case PatternKind::period3_y: return "period3_y";
    case PatternKind::period4_y: return "period4_y";
  }
  return "unknown";
}

std::size_t pattern_param_count(PatternKind kind) {
  switch (kind) {
    case PatternKind::period3_x:
    case PatternKind::period3_y: return 2;
    case PatternKind::period4_x:
    case PatternKind::period4_y: return 3;
    default: return 1;
  }
}

DetuningPattern preset_pattern(PatternKind kind, const std::vector<cplx>& params) {
  if (params.size() != pattern_param_count(kind)) {
    std::ostringstream os;
    os << to_string(kind) << " expects " << pattern_param_count(kind) << " parameters, got "
       << params.size();
    fail(ErrorKind::invalid_input, os.str());
  }
  switch (kind) {
    case PatternKind::uniform: return DetuningPattern({{0, 0, params[0]}}, 1, 1);
    case PatternKind::checkerboard: return DetuningPattern({{1, 1, params[0]}}, 2, 2);
    case PatternKind::stripe_x: return DetuningPattern({{1, 0, params[0]}}, 2, 1);
    case PatternKind::stripe_y: return DetuningPattern({{0, 1, params[0]}}, 1, 2);
    case PatternKind::period3_x:
      return DetuningPattern({{0, 0, params[0]}, {1, 0, params[1]}, {2, 0, std::conj(params[1])}},
                             3, 1);
    case PatternKind::period3_y:
      return DetuningPattern({{0, 0, params[0]}, {0, 1, params[1]}, {0, 2, std::conj(params[1])}},
                             1, 3);
    case PatternKind::period4_x:
      return DetuningPattern({{0, 0, params[0]},
                              {1, 0, params[1]},
                              {3, 0, std::conj(params[1])},
                              {2, 0, params[2]}},
                             4, 1);
    case PatternKind::period4_y:
      return DetuningPattern({{0, 0, params[0]},
                              {0, 1, params[1]},
                              {0, 3, std::conj(params[1])},
                              {0, 2, params[2]}},
                             1, 4);
  }
  fail(ErrorKind::invalid_input, "unsupported pattern kind");
}

double sample_detuning(const DetuningPattern& pattern, const Site& n, double t) {
  return pattern.sample(n, t);
}

double sample_detuning(const DetuningPattern& pattern, const Lattice& lattice, const Vec3& position,
                       double t) {
  const int j = lattice.find(position);
  if (j < 0) fail(ErrorKind::invalid_input, "position is not a lattice site");
  return pattern.sample(lattice.site(j), t);
}

}  // namespace darklattice
