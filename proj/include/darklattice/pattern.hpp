#pragma once

#include <functional>
#include <string>
#include <vector>

#include "darklattice/core.hpp"
#include "darklattice/lattice.hpp"

namespace darklattice {

using Envelope = std::function<double(double)>;

// Fourier component with quasimomentum Q = 2pi (qx/Nx, qy/Ny) / d.
struct FourierComponent {
  int qx = 0;
  int qy = 0;
  cplx amplitude{0.0, 0.0};
};

class DetuningPattern {
 public:
  DetuningPattern() = default;
  // Throws invalid_input if the component set is not closed under conjugation.
  DetuningPattern(std::vector<FourierComponent> components, int period_x, int period_y,
                  Envelope envelope = {});

  const std::vector<FourierComponent>& components() const { return components_; }
  int period_x() const { return period_x_; }
  int period_y() const { return period_y_; }
  bool has_envelope() const { return static_cast<bool>(envelope_); }

  double envelope(double t) const { return envelope_ ? envelope_(t) : 1.0; }
  DetuningPattern with_envelope(Envelope envelope) const;

  // Static part sum_Q Delta_Q e^{iQ.r}; throws consistency if not real.
  double value(const Site& n) const;
  double sample(const Site& n, double t) const { return envelope(t) * value(n); }

  // Quasimomentum of a component in units of 1/lambda0.
  Vec2 quasimomentum(const FourierComponent& c, double spacing) const;

  // Per-site static values on a lattice.
  std::vector<double> site_values(const Lattice& lattice) const;

 private:
  std::vector<FourierComponent> components_;
  int period_x_ = 1;
  int period_y_ = 1;
  Envelope envelope_;
};

// Diagnostics for a candidate component set; empty when realness holds.
std::vector<std::string> realness_diagnostics(const std::vector<FourierComponent>& components,
                                              int period_x, int period_y);

enum class PatternKind {
  uniform,
  checkerboard,
  stripe_x,
  stripe_y,
  period3_x,
  period4_x,
  period3_y,
  period4_y,
};

PatternKind parse_pattern_kind(const std::string& name);
std::string to_string(PatternKind kind);
std::size_t pattern_param_count(PatternKind kind);

// uniform, checkerboard, stripe: {Delta}; period3: {alpha, beta}; period4: {alpha, beta, delta}.
// beta multiplies e^{+iQ.r} with Q the smallest positive wavevector.
DetuningPattern preset_pattern(PatternKind kind, const std::vector<cplx>& params);

double sample_detuning(const DetuningPattern& pattern, const Site& n, double t);
// Position must coincide with a lattice site.
double sample_detuning(const DetuningPattern& pattern, const Lattice& lattice, const Vec3& position,
                       double t);

}  // namespace darklattice
