#include "darklattice/config.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "darklattice/bands.hpp"
#include "darklattice/io.hpp"
#include "darklattice/protocols.hpp"

namespace darklattice {

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"bands", "disperse", "store",  "retrieve", "shape", "spectrum",
                                              "sidebands", "steer", "rabi", "cycle", "defects"};
  return kinds;
}

json default_config(const std::string& experiment) {
  json c = {
      {"experiment", experiment},
      {"lattice", {{"nx", 21}, {"ny", 21}, {"spacing", 0.3}, {"dipole", "circular"}, {"defects", json::array()}}},
      {"pattern", {{"kind", "checkerboard"}, {"params", json::array({2.0})}}},
      {"dynamics",
       {{"dt", 0.01},
        {"t_end", 2000.0},
        {"t_storage", 0.0},
        {"Delta_store", 5.0},
        {"Delta_retrieve", 2.0},
        {"stop_norm", 1e-6},
        {"record_every", 1}}},
      {"mode", {{"waist", 6.0}, {"polarization", "circular"}}},
      {"sweep", {{"parameter", ""}, {"values", json::array()}}},
      {"output", {{"dir", "."}}},
      {"threads", 0},
  };
  if (experiment == "bands") {
    c["bands"] = {{"path", {"M'", "G", "X'", "M'"}}, {"samples", 50}, {"Delta", 0.0}, {"folded", false},
                  {"truncation", 150.0}};
  } else if (experiment == "disperse") {
    c["disperse"] = {{"point", "M"}, {"k", nullptr}, {"truncation", 150.0}};
  } else if (experiment == "store") {
    c["store"] = {{"pattern", "checkerboard"}};
  } else if (experiment == "retrieve") {
    c["retrieve"] = {{"optimize", false}};
  } else if (experiment == "shape") {
    c["lattice"]["spacing"] = 0.2;
    c["dynamics"]["dt"] = 0.005;
    c["dynamics"]["Delta_store"] = 20.0;
    c["shape"] = {{"window", "blackman"}, {"t_end", 10.0}, {"total", 1.0},  {"taper", 0.5},
                  {"solver_dt", 1e-3},    {"plateau", 0.5}, {"cap", 20.0},  {"tail", 5.0}};
  } else if (experiment == "spectrum") {
    c["spectrum"] = {{"Delta", 2.0},        {"omega_min", -15.0}, {"omega_max", 15.0},
                     {"omega_step", 0.01}, {"settle", 10.0}};
  } else if (experiment == "sidebands") {
    c["dynamics"]["dt"] = 0.005;
    c["dynamics"]["record_every"] = 2;
    c["sidebands"] = {{"Delta", 0.75}, {"delta", 1.5 * 2.0 * kPi}, {"Omega", 2.0 * kPi}, {"max_order", 3},
                      {"settle", 10.0}};
  } else if (experiment == "steer") {
    c["lattice"]["nx"] = 41;
    c["lattice"]["ny"] = 41;
    c["mode"]["waist"] = 12.0;
    c["pattern"] = {{"kind", "period3_x"}, {"params", {0.0, 0.5}}};
    c["dynamics"]["stop_norm"] = 1e-5;
    c["dynamics"]["record_every"] = 2;
    c["steer"] = {{"theta_points", 721}};
  } else if (experiment == "rabi") {
    c["dynamics"]["dt"] = 0.005;
    c["dynamics"]["t_end"] = 12.0;
    c["dynamics"]["record_every"] = 5;
    c["rabi"] = {{"Delta", 5.0}, {"Phi_min", kPi}, {"directions", 64}};
  } else if (experiment == "cycle") {
    c["lattice"]["nx"] = 61;
    c["lattice"]["ny"] = 61;
    c["lattice"]["spacing"] = 0.4;
    c["mode"]["waist"] = 16.0;
    c["pattern"] = {{"kind", "period3_y"}, {"params", {0.0, {0.0, 5.0}}}};
    c["dynamics"]["t_end"] = 2.0;
    c["dynamics"]["record_every"] = 1;
  } else if (experiment == "defects") {
    c["defects"] = {{"sets", {"one", "three", "seven", "nine"}}, {"waists", {3.0, 4.0, 5.0, 6.0}}};
  }
  return c;
}

void merge_config(json& base, const json& over) {
  if (!over.is_object() || !base.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
      merge_config(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

std::string config_hash(const json& config) {
  json c = config;
  if (c.is_object()) {
    c.erase("threads");
    if (c.contains("output") && c["output"].is_object()) c["output"].erase("dir");
  }
  return hex64(fnv1a64(c.dump()));
}

// ------------------------------------------------------------------ parsing

CVec3 parse_polarization(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "circular") return circular_dipole();
    if (s == "x") return CVec3(1.0, 0.0, 0.0);
    if (s == "y") return CVec3(0.0, 1.0, 0.0);
    if (s == "z") return CVec3(0.0, 0.0, 1.0);
    fail(ErrorKind::invalid_input, "unknown polarization '" + s + "'");
  }
  if (v.is_array() && v.size() == 3) {
    const auto a = parse_amplitudes(v);
    return CVec3(a[0], a[1], a[2]);
  }
  fail(ErrorKind::invalid_input, "polarization must be a name or three amplitudes");
}

std::vector<cplx> parse_amplitudes(const json& v) {
  if (!v.is_array()) fail(ErrorKind::invalid_input, "amplitudes must be an array");
  std::vector<cplx> out;
  for (const auto& e : v) {
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      fail(ErrorKind::invalid_input, "amplitude must be a number or [re, im]");
    }
  }
  return out;
}

Lattice lattice_from_config(const json& c) {
  const auto& l = c.at("lattice");
  Lattice lat = build_square_lattice(l.at("nx").get<int>(), l.at("ny").get<int>(), l.at("spacing").get<double>(),
                                     parse_polarization(l.at("dipole")));
  std::vector<Vec2> holes;
  for (const auto& h : l.at("defects")) holes.emplace_back(h.at(0).get<double>(), h.at(1).get<double>());
  return holes.empty() ? lat : apply_defects(lat, holes);
}

namespace {

std::vector<FourierComponent> custom_components(const json& p) {
  std::vector<FourierComponent> comps;
  for (const auto& e : p.at("components")) {
    FourierComponent fc;
    fc.qx = e.at("q").at(0).get<int>();
    fc.qy = e.at("q").at(1).get<int>();
    fc.amplitude = parse_amplitudes(json::array({e.at("amplitude")}))[0];
    comps.push_back(fc);
  }
  return comps;
}

}  // namespace

DetuningPattern pattern_from_config(const json& c) {
  const auto& p = c.at("pattern");
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "custom")
    return DetuningPattern(custom_components(p), p.at("period").at(0).get<int>(), p.at("period").at(1).get<int>());
  return preset_pattern(parse_pattern_kind(kind), parse_amplitudes(p.at("params")));
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input:
    case ErrorKind::domain: return 2;
    case ErrorKind::instability: return 3;
    case ErrorKind::infeasible: return 4;
    default: return 5;
  }
}

// --------------------------------------------------------------- validation

namespace {

class Checker {
 public:
  Checker(const json& c, std::vector<std::string>& out) : c_(c), out_(out) {}

  const json* get(const std::string& path) const {
    const json* cur = &c_;
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (!cur->is_object() || !cur->contains(key)) return nullptr;
      cur = &(*cur)[key];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return cur;
  }

  void add(const std::string& msg) { out_.push_back(msg); }

  // Returns the value if numeric, reporting otherwise.
  std::optional<double> number(const std::string& path) {
    const json* v = get(path);
    if (!v) {
      add(path + " is missing");
      return std::nullopt;
    }
    if (!v->is_number()) {
      add(path + " must be a number");
      return std::nullopt;
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
      add(path + " must be finite");
      return std::nullopt;
    }
    return x;
  }
  void positive(const std::string& path) {
    if (auto x = number(path); x && !(*x > 0.0)) add(path + " must be positive");
  }
  void nonnegative(const std::string& path) {
    if (auto x = number(path); x && !(*x >= 0.0)) add(path + " must be >= 0");
  }
  std::optional<long> integer(const std::string& path, long lo) {
    const json* v = get(path);
    if (!v) {
      add(path + " is missing");
      return std::nullopt;
    }
    if (!v->is_number_integer()) {
      add(path + " must be an integer");
      return std::nullopt;
    }
    const long x = v->get<long>();
    if (x < lo) {
      add(path + " must be >= " + std::to_string(lo));
      return std::nullopt;
    }
    return x;
  }
  std::optional<std::string> string(const std::string& path) {
    const json* v = get(path);
    if (!v || !v->is_string()) {
      add(path + " must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

 private:
  const json& c_;
  std::vector<std::string>& out_;
};

void unknown_keys(const json& given, const json& known, const std::string& prefix, std::vector<std::string>& out) {
  if (!given.is_object() || !known.is_object()) return;
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!known.contains(it.key())) {
      out.push_back("unknown key '" + path + "'");
      continue;
    }
    // Custom patterns carry their own keys.
    if (path == "pattern") continue;
    unknown_keys(it.value(), known[it.key()], path, out);
  }
}

bool valid_amplitudes(const json* v) {
  if (!v || !v->is_array()) return false;
  for (const auto& e : *v) {
    if (e.is_number()) continue;
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) continue;
    return false;
  }
  return true;
}

bool valid_amplitude(const json& e) {
  const json wrapped = json::array({e});
  return valid_amplitudes(&wrapped);
}

void check_pattern(Checker& ck, const json& c, std::vector<std::string>& out) {
  const auto kind = ck.string("pattern.kind");
  if (!kind) return;
  const json& p = c["pattern"];
  if (*kind == "custom") {
    const json* per = ck.get("pattern.period");
    const json* comps = ck.get("pattern.components");
    if (!per || !per->is_array() || per->size() != 2 || !(*per)[0].is_number_integer() ||
        !(*per)[1].is_number_integer() || (*per)[0].get<int>() < 1 || (*per)[1].get<int>() < 1) {
      ck.add("pattern.period must be two positive integers");
      return;
    }
    if (!comps || !comps->is_array() || comps->empty()) {
      ck.add("pattern.components must be a non-empty array");
      return;
    }
    std::vector<FourierComponent> list;
    for (std::size_t i = 0; i < comps->size(); ++i) {
      const json& e = (*comps)[i];
      const std::string at = "pattern.components[" + std::to_string(i) + "]";
      if (!e.is_object() || !e.contains("q") || !e["q"].is_array() || e["q"].size() != 2 ||
          !e["q"][0].is_number_integer() || !e["q"][1].is_number_integer() || !e.contains("amplitude") ||
          !valid_amplitude(e["amplitude"])) {
        ck.add(at + " must have integer q [qx, qy] and an amplitude");
        return;
      }
      FourierComponent fc;
      fc.qx = e["q"][0].get<int>();
      fc.qy = e["q"][1].get<int>();
      fc.amplitude = parse_amplitudes(json::array({e["amplitude"]}))[0];
      list.push_back(fc);
    }
    for (const auto& d : realness_diagnostics(list, (*per)[0].get<int>(), (*per)[1].get<int>()))
      ck.add("pattern.components: " + d);
    return;
  }
  PatternKind pk;
  try {
    pk = parse_pattern_kind(*kind);
  } catch (const Error&) {
    ck.add("pattern.kind '" + *kind + "' is not a known pattern");
    return;
  }
  const json* params = ck.get("pattern.params");
  if (!valid_amplitudes(params)) {
    ck.add("pattern.params must be an array of numbers or [re, im] pairs");
    return;
  }
  const auto amps = parse_amplitudes(p["params"]);
  if (amps.size() != pattern_param_count(pk)) {
    ck.add("pattern.params must have " + std::to_string(pattern_param_count(pk)) + " entries for " + *kind);
    return;
  }
  // Real-only slots: the single amplitude, alpha, and the period-4 delta.
  std::vector<std::size_t> real_slots{0};
  if (pk == PatternKind::period4_x || pk == PatternKind::period4_y) real_slots.push_back(2);
  for (std::size_t i : real_slots)
    if (amps[i].imag() != 0.0) {
      std::ostringstream os;
      os << "pattern.params[" << i << "] must be real for " << *kind << " (imaginary part " << amps[i].imag()
         << " breaks realness of the detuning)";
      out.push_back(os.str());
    }
}

}  // namespace

std::vector<std::string> validate_config(const json& c) {
  std::vector<std::string> out;
  if (!c.is_object()) return {"config must be a JSON object"};
  Checker ck(c, out);
  const auto exp = ck.string("experiment");
  if (!exp) return out;
  bool known = false;
  for (const auto& k : experiment_kinds()) known = known || k == *exp;
  if (!known) {
    out.push_back("experiment '" + *exp + "' is not a known experiment");
    return out;
  }
  unknown_keys(c, default_config(*exp), "", out);

  ck.integer("lattice.nx", 1);
  ck.integer("lattice.ny", 1);
  ck.positive("lattice.spacing");
  if (const json* d = ck.get("lattice.dipole")) {
    try {
      const CVec3 v = parse_polarization(*d);
      if (v.norm() == 0.0) out.push_back("lattice.dipole must be nonzero");
    } catch (const Error&) {
      out.push_back("lattice.dipole must be circular, x, y, z or three amplitudes");
    }
  }
  if (const json* h = ck.get("lattice.defects")) {
    bool ok = h->is_array();
    if (ok)
      for (const auto& e : *h) ok = ok && e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number();
    if (!ok) out.push_back("lattice.defects must be an array of [x, y] pairs in units of d");
  }
  check_pattern(ck, c, out);

  if (auto dt = ck.number("dynamics.dt")) {
    if (!(*dt > 0.0))
      out.push_back("dynamics.dt must be positive");
    else if (*dt > 0.01)
      out.push_back("dynamics.dt must be <= 0.01");
  }
  ck.positive("dynamics.t_end");
  ck.nonnegative("dynamics.t_storage");
  ck.number("dynamics.Delta_store");
  ck.number("dynamics.Delta_retrieve");
  ck.nonnegative("dynamics.stop_norm");
  ck.integer("dynamics.record_every", 1);
  ck.positive("mode.waist");
  if (const json* p = ck.get("mode.polarization")) {
    try {
      parse_polarization(*p);
    } catch (const Error&) {
      out.push_back("mode.polarization must be circular, x, y, z or three amplitudes");
    }
  }
  if (auto param = ck.string("sweep.parameter")) {
    if (!param->empty() && *param != "waist") out.push_back("sweep.parameter must be empty or 'waist'");
    const json* v = ck.get("sweep.values");
    bool ok = v && v->is_array();
    if (ok)
      for (const auto& e : *v) ok = ok && e.is_number() && e.get<double>() > 0.0;
    if (!ok) out.push_back("sweep.values must be an array of positive numbers");
    if (ok && !param->empty() && v->empty()) out.push_back("sweep.values must not be empty when sweeping");
  }
  ck.string("output.dir");
  ck.integer("threads", 0);

  if (*exp == "bands") {
    const json* path = ck.get("bands.path");
    if (!path || !path->is_array() || path->size() < 2) {
      out.push_back("bands.path must list at least two symmetry points");
    } else {
      for (const auto& l : *path) {
        if (!l.is_string()) {
          out.push_back("bands.path entries must be strings");
          break;
        }
        try {
          symmetry_point(l.get<std::string>(), 1.0);
        } catch (const Error&) {
          out.push_back("bands.path has unknown point '" + l.get<std::string>() + "'");
        }
      }
    }
    ck.integer("bands.samples", 1);
    ck.nonnegative("bands.Delta");
    if (const json* f = ck.get("bands.folded"); !f || !f->is_boolean()) out.push_back("bands.folded must be a boolean");
    if (auto r = ck.number("bands.truncation"); r && !(*r >= 20.0)) out.push_back("bands.truncation must be >= 20 (units of d)");
  } else if (*exp == "disperse") {
    const json* k = ck.get("disperse.k");
    if (k && !k->is_null()) {
      if (!k->is_array() || k->size() != 2 || !(*k)[0].is_number() || !(*k)[1].is_number())
        out.push_back("disperse.k must be null or [kx, ky]");
    } else if (auto p = ck.string("disperse.point")) {
      try {
        symmetry_point(*p, 1.0);
      } catch (const Error&) {
        out.push_back("disperse.point '" + *p + "' is not a symmetry point");
      }
    }
    if (auto r = ck.number("disperse.truncation"); r && !(*r >= 20.0))
      out.push_back("disperse.truncation must be >= 20 (units of d)");
  } else if (*exp == "store") {
    if (auto p = ck.string("store.pattern")) {
      try {
        if (pattern_param_count(parse_pattern_kind(*p)) != 1) out.push_back("store.pattern must be a single-amplitude pattern");
      } catch (const Error&) {
        out.push_back("store.pattern '" + *p + "' is not a known pattern");
      }
    }
  } else if (*exp == "retrieve") {
    if (const json* o = ck.get("retrieve.optimize"); !o || !o->is_boolean())
      out.push_back("retrieve.optimize must be a boolean");
  } else if (*exp == "shape") {
    if (auto w = ck.string("shape.window")) {
      try {
        parse_window_kind(*w);
      } catch (const Error&) {
        out.push_back("shape.window '" + *w + "' is not a known window");
      }
    }
    ck.positive("shape.t_end");
    if (auto t = ck.number("shape.total"); t && !(*t > 0.0)) out.push_back("shape.total must be positive");
    if (auto t = ck.number("shape.taper"); t && !(*t >= 0.0 && *t <= 1.0)) out.push_back("shape.taper must lie in [0, 1]");
    ck.positive("shape.solver_dt");
    ck.number("shape.plateau");
    ck.positive("shape.cap");
    ck.nonnegative("shape.tail");
  } else if (*exp == "spectrum") {
    ck.number("spectrum.Delta");
    ck.nonnegative("spectrum.settle");
    auto lo = ck.number("spectrum.omega_min");
    auto hi = ck.number("spectrum.omega_max");
    ck.positive("spectrum.omega_step");
    if (lo && hi && !(*hi > *lo)) out.push_back("spectrum.omega_max must exceed spectrum.omega_min");
  } else if (*exp == "sidebands") {
    ck.number("sidebands.Delta");
    ck.nonnegative("sidebands.settle");
    ck.nonnegative("sidebands.delta");
    ck.positive("sidebands.Omega");
    ck.integer("sidebands.max_order", 0);
  } else if (*exp == "steer") {
    ck.integer("steer.theta_points", 3);
    if (auto k = ck.string("pattern.kind"); k && *k != "period3_x" && *k != "period4_x" && *k != "custom")
      out.push_back("pattern.kind must be period3_x or period4_x for steer");
  } else if (*exp == "rabi") {
    ck.number("rabi.Delta");
    if (auto p = ck.number("rabi.Phi_min"); p && !(*p > 0.0 && *p <= kPi + 1e-12))
      out.push_back("rabi.Phi_min must lie in (0, pi]");
    ck.integer("rabi.directions", 1);
  } else if (*exp == "cycle") {
    if (auto k = ck.string("pattern.kind"); k && *k != "period3_y" && *k != "period4_y")
      out.push_back("pattern.kind must be period3_y or period4_y for cycle");
  } else if (*exp == "defects") {
    const json* s = ck.get("defects.sets");
    bool ok = s && s->is_array() && !s->empty();
    if (ok)
      for (const auto& e : *s) {
        if (!e.is_string()) {
          ok = false;
          break;
        }
        bool found = false;
        for (const auto& d : standard_defect_sets()) found = found || d.name == e.get<std::string>();
        if (!found) out.push_back("defects.sets has unknown set '" + e.get<std::string>() + "'");
      }
    if (!ok) out.push_back("defects.sets must be a non-empty array of set names");
    const json* w = ck.get("defects.waists");
    ok = w && w->is_array() && !w->empty();
    if (ok)
      for (const auto& e : *w) ok = ok && e.is_number() && e.get<double>() > 0.0;
    if (!ok) out.push_back("defects.waists must be a non-empty array of positive numbers (units of d)");
  }
  return out;
}

}  // namespace darklattice
