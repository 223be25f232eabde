#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "darklattice/bands.hpp"
#include "darklattice/config.hpp"
#include "darklattice/io.hpp"
#include "darklattice/protocols.hpp"

namespace darklattice {

namespace {

json peaks_json(const std::vector<SpectralPeak>& peaks) {
  json a = json::array();
  for (const auto& p : peaks) a.push_back({{"center", p.center}, {"width", p.width}, {"weight", p.weight}});
  return a;
}

json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

RetrievalOptions retrieval_options(const json& c) {
  const auto& d = c["dynamics"];
  RetrievalOptions o;
  o.Delta_store = d["Delta_store"].get<double>();
  o.dt = d["dt"].get<double>();
  o.stop_norm = d["stop_norm"].get<double>();
  o.t_max = d["t_end"].get<double>();
  o.record_every = d["record_every"].get<int>();
  return o;
}

SpectrumOptions spectrum_options(const json& c) {
  const auto& d = c["dynamics"];
  SpectrumOptions o;
  o.Delta_store = d["Delta_store"].get<double>();
  o.dt = d["dt"].get<double>();
  o.stop_norm = d["stop_norm"].get<double>();
  o.t_max = d["t_end"].get<double>();
  o.record_every = d["record_every"].get<int>();
  o.settle = c[c["experiment"].get<std::string>()]["settle"].get<double>();
  return o;
}

std::string label_for(double ky_d) {
  // ky d as a multiple of pi/6 (covers periods 3 and 4).
  const long m = std::lround(ky_d / (kPi / 6.0));
  static const char* names[] = {"0", "pi/6", "pi/3", "pi/2", "2pi/3", "5pi/6", "pi"};
  const std::string base = names[std::min<long>(std::abs(m), 6)];
  return "(pi," + (m < 0 ? "-" + base : base) + ")";
}

json run_bands(const json& c, std::ostream& csv, const std::string& comment) {
  const auto& b = c["bands"];
  const double d = c["lattice"]["spacing"].get<double>();
  const CVec3 dip = parse_polarization(c["lattice"]["dipole"]);
  std::vector<std::string> labels;
  for (const auto& l : b["path"]) labels.push_back(l.get<std::string>());
  const BandPath path = make_band_path(labels, d, b["samples"].get<int>());
  const double R = b["truncation"].get<double>() * d;
  const double Delta = b["Delta"].get<double>();
  const auto pts = Delta > 0.0 ? band_path_checkerboard(path, d, Delta, dip, R)
                               : band_path_bravais(path, d, dip, R, b["folded"].get<bool>());
  write_bands_csv(csv, pts, comment);
  return {{"points", pts.size()}, {"branches", pts.empty() ? 0 : pts.front().branches.size()}};
}

json run_disperse(const json& c, std::ostream& csv, const std::string& comment) {
  const auto& b = c["disperse"];
  const double d = c["lattice"]["spacing"].get<double>();
  const Vec2 k = b["k"].is_null() ? symmetry_point(b["point"].get<std::string>(), d)
                                  : Vec2(b["k"][0].get<double>(), b["k"][1].get<double>());
  const Dispersion r = dispersion(k, d, parse_polarization(c["lattice"]["dipole"]), b["truncation"].get<double>() * d);
  CsvWriter w(csv, {"kx", "ky", "J", "Gamma"}, comment);
  w.row({k.x(), k.y(), r.J, r.Gamma});
  return {{"k", vec2_json(k)}, {"J", r.J}, {"Gamma", r.Gamma}};
}

json run_store(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  StoreOptions so;
  so.pattern = parse_pattern_kind(c["store"]["pattern"].get<std::string>());
  const double waist = c["mode"]["waist"].get<double>() * lat.spacing();
  const auto s = prepare_stored_state(lat, M, waist, c["dynamics"]["Delta_store"].get<double>(), 1e-3, so);
  CsvWriter w(csv, {"j", "nx", "ny", "x", "y", "re", "im"}, comment);
  for (int j = 0; j < lat.size(); ++j)
    w.row({static_cast<double>(j), static_cast<double>(lat.site(j).nx), static_cast<double>(lat.site(j).ny),
           lat.position(j).x(), lat.position(j).y(), s.e[j].real(), s.e[j].imag()});
  const auto pops = momentum_populations(lat, s.e);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pops.size(); ++i)
    if (pops[i] > pops[best]) best = i;
  const int ny = lat.ny();
  const Vec2 kbest(2.0 * kPi * static_cast<double>(best / ny) / lat.nx() / lat.spacing(),
                   2.0 * kPi * static_cast<double>(best % ny) / ny / lat.spacing());
  return {{"waist", waist},
          {"dominant_k", vec2_json(wrap_to_zone(kbest, lat.spacing()))},
          {"dominant_population", pops[best]}};
}

json run_retrieve(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const double d = lat.spacing();
  const auto opt = retrieval_options(c);
  const double Dr = c["dynamics"]["Delta_retrieve"].get<double>();
  const double ts = c["dynamics"]["t_storage"].get<double>();
  if (c["retrieve"]["optimize"].get<bool>()) {
    const auto ws = optimal_waist(lat, M, Dr, ts, opt);
    CsvWriter w(csv, {"waist_over_d", "waist", "epsilon"}, comment);
    for (const auto& [wa, e] : ws.evaluations) w.row({wa / d, wa, e});
    return {{"optimal_waist", ws.waist}, {"optimal_waist_over_d", ws.waist / d}, {"epsilon", ws.epsilon},
            {"eta", 1.0 - ws.epsilon}};
  }
  std::vector<double> waists;
  if (c["sweep"]["parameter"] == "waist")
    for (const auto& v : c["sweep"]["values"]) waists.push_back(v.get<double>() * d);
  if (waists.empty()) {
    const auto r = retrieval_experiment(lat, M, c["mode"]["waist"].get<double>() * d, Dr, ts, opt);
    write_photon_csv(csv, r.record, comment);
    return {{"waist", r.waist}, {"eta", r.eta}, {"epsilon", r.epsilon}};
  }
  const auto rs = waist_sweep(lat, M, waists, Dr, ts, opt);
  CsvWriter w(csv, {"waist_over_d", "waist", "eta", "epsilon"}, comment);
  std::size_t best = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    w.row({rs[i].waist / d, rs[i].waist, rs[i].eta, rs[i].epsilon});
    if (rs[i].epsilon < rs[best].epsilon) best = i;
  }
  return {{"best_waist", rs[best].waist}, {"best_waist_over_d", rs[best].waist / d}, {"min_epsilon", rs[best].epsilon}};
}

json run_shape(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto& s = c["shape"];
  const WindowShape target = window_shape(parse_window_kind(s["window"].get<std::string>()), s["t_end"].get<double>(),
                                          s["total"].get<double>(), s["taper"].get<double>());
  ShapingOptions so;
  so.Delta_store = c["dynamics"]["Delta_store"].get<double>();
  so.dt = c["dynamics"]["dt"].get<double>();
  so.tail = s["tail"].get<double>();
  so.solver.dt = s["solver_dt"].get<double>();
  so.solver.plateau = s["plateau"].get<double>();
  so.solver.cap = s["cap"].get<double>();
  const auto r = shaping_experiment(lat, M, target, c["mode"]["waist"].get<double>() * lat.spacing(), so);
  CsvWriter w(csv, {"t", "Delta", "target_dndt", "achieved_dndt"}, comment);
  double dmax = 0.0;
  for (double v : r.sequence.values) dmax = std::max(dmax, std::abs(v));
  for (std::size_t i = 0; i < r.times.size(); ++i)
    w.row({r.times[i], r.sequence.value_at(r.times[i]), r.target[i], r.achieved[i]});
  json out = {{"l2_error", r.l2_error}, {"l1_error", r.l1_error}, {"eta", r.eta},   {"Gamma_r", r.Gamma_r},
              {"J", r.J},               {"max_abs_Delta", dmax},    {"compare_until", r.compare_until}};
  out["plateau_start"] = r.sequence.plateau_start ? json(*r.sequence.plateau_start) : json(nullptr);
  return out;
}

json run_spectrum(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto& s = c["spectrum"];
  const double d = lat.spacing();
  const double Delta = s["Delta"].get<double>();
  const auto omega =
      frequency_grid(s["omega_min"].get<double>(), s["omega_max"].get<double>(), s["omega_step"].get<double>());
  const auto fin = finite_two_color(lat, M, Delta, c["mode"]["waist"].get<double>() * d, omega, spectrum_options(c));
  const Dispersion rad = dispersion(Vec2::Zero(), d, lat.dipole());
  const Dispersion dark = dispersion(Vec2(kPi / d, kPi / d), d, lat.dipole());
  const auto model = two_color_spectrum(Delta, dark.J, rad.J, rad.Gamma, omega);
  double mpk = 0.0;
  for (const auto& e : model.E) mpk = std::max(mpk, std::abs(e));
  CsvWriter w(csv, {"omega", "abs_E", "abs_E_model"}, comment);
  for (std::size_t i = 0; i < omega.size(); ++i)
    w.row({omega[i], std::abs(fin.E[i]), mpk > 0 ? std::abs(model.E[i]) / mpk : 0.0});
  return {{"predominant", fin.predominant},
          {"fitted", peaks_json(fin.fitted)},
          {"fitted_separation", std::abs(fin.fitted[1].center - fin.fitted[0].center)},
          {"model", peaks_json(model.peaks)},
          {"model_separation", model.separation},
          {"J_dark", dark.J},
          {"J_rad", rad.J},
          {"Gamma_rad", rad.Gamma}};
}

json run_sidebands(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto& s = c["sidebands"];
  const auto r = finite_sidebands(lat, M, s["Delta"].get<double>(), s["delta"].get<double>(), s["Omega"].get<double>(),
                                  c["mode"]["waist"].get<double>() * lat.spacing(), s["max_order"].get<int>(),
                                  spectrum_options(c));
  write_spectrum_csv(csv, r.omega, r.abs_E, comment);
  return {{"center", r.center}, {"orders", r.orders}, {"measured", r.measured}, {"expected", r.expected}};
}

json run_steer(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto& d = c["dynamics"];
  SteeringOptions so;
  so.Delta_store = d["Delta_store"].get<double>();
  so.dt = d["dt"].get<double>();
  so.stop_norm = d["stop_norm"].get<double>();
  so.t_max = d["t_end"].get<double>();
  so.record_every = d["record_every"].get<int>();
  so.theta_points = c["steer"]["theta_points"].get<int>();
  const auto r = steering_experiment(lat, M, pattern_from_config(c), c["mode"]["waist"].get<double>() * lat.spacing(), so);
  write_angular_csv(csv, r.profile.theta, r.profile.magnitude, comment);
  json coupled = json::array();
  for (std::size_t i = 0; i < r.report.coupled.size(); ++i)
    coupled.push_back({{"k", vec2_json(r.report.coupled[i])}, {"inside_light_cone", bool(r.report.inside_light_cone[i])}});
  return {{"period", r.report.period},
          {"coupled", coupled},
          {"sin_theta", r.report.sin_theta},
          {"symmetry", to_string(r.report.symmetry)},
          {"omega", r.profile.omega}};
}

json run_rabi(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto& dy = c["dynamics"];
  const auto& rb = c["rabi"];
  const double d = lat.spacing();
  const double Delta = rb["Delta"].get<double>();
  const double waist = c["mode"]["waist"].get<double>() * d;
  const auto r = rabi_experiment(lat, M, Delta, waist, dy["t_end"].get<double>(), dy["dt"].get<double>(),
                                 dy["record_every"].get<int>(), dy["Delta_store"].get<double>());
  CsvWriter w(csv, {"t", "pop_X", "pop_M", "norm"}, comment);
  for (std::size_t i = 0; i < r.times.size(); ++i) w.row({r.times[i], r.pop_a[i], r.pop_b[i], r.norm[i]});
  const JAccessor J = [&](const Vec2& k) { return dispersion(k, d, lat.dipole()).J; };
  const double og = generalized_rabi(Vec2(kPi / d, 0.0), Vec2(0.0, kPi / d), Delta, J, d);
  const double q = quality_factor_for_waist(d, Delta, waist, rb["Phi_min"].get<double>(), lat.dipole(),
                                            rb["directions"].get<int>());
  json maxima = json::array();
  for (std::size_t i : r.maxima) maxima.push_back(r.times[i]);
  return {{"omega_gen", og},
          {"quality_factor", std::isfinite(q) ? json(q) : json("inf")},
          {"maxima", r.maxima.size()},
          {"maxima_times", maxima}};
}

json run_cycle(const json& c, std::ostream& csv, const std::string& comment) {
  const Lattice lat = lattice_from_config(c);
  const auto M = coupling_matrix(lat);
  const auto pat = pattern_from_config(c);
  const double d = lat.spacing();
  const int P = pat.period_y();
  std::vector<Vec2> ks;
  std::vector<std::string> labels;
  for (int m = 0; m < P; ++m) {
    double ky = 2.0 * kPi * m / P;
    if (ky > kPi + 1e-12) ky -= 2.0 * kPi;
    ks.emplace_back(kPi / d, ky / d);
    labels.push_back(label_for(ky));
  }
  const auto& dy = c["dynamics"];
  const auto r = cycle_experiment(lat, M, pat, ks, labels, c["mode"]["waist"].get<double>() * d, dy["t_end"].get<double>(),
                                  dy["dt"].get<double>(), dy["record_every"].get<int>(), dy["Delta_store"].get<double>());
  std::vector<std::string> header{"t"};
  for (const auto& l : labels) header.push_back("pop_" + l);
  CsvWriter w(csv, header, comment);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    std::vector<double> row{r.times[i]};
    for (const auto& p : r.populations) row.push_back(p[i]);
    w.row(row);
  }
  json order = json::array();
  for (int s : r.order) order.push_back(labels[static_cast<std::size_t>(s)]);
  return {{"states", labels}, {"order", order}};
}

json run_defects(const json& c, std::ostream& csv, const std::string& comment) {
  json lc = c;
  lc["lattice"]["defects"] = json::array();
  const Lattice base = lattice_from_config(lc);
  const double d = base.spacing();
  std::vector<DefectSet> sets;
  const auto all = standard_defect_sets();
  for (const auto& n : c["defects"]["sets"])
    for (const auto& s : all)
      if (s.name == n.get<std::string>()) sets.push_back(s);
  std::vector<double> waists;
  for (const auto& w : c["defects"]["waists"]) waists.push_back(w.get<double>() * d);
  const auto r = defect_sweep(base, sets, waists, c["dynamics"]["Delta_retrieve"].get<double>(), retrieval_options(c));
  CsvWriter w(csv, {"set", "waist_over_d", "fraction", "drop", "eta", "eta_reference"}, comment);
  for (const auto& p : r.points)
    w.row(std::vector<std::string>{p.set, fmt(p.waist / d), fmt(p.fraction), fmt(p.drop), fmt(p.eta),
                                   fmt(p.eta_reference)});
  return {{"alpha", r.alpha}, {"points", r.points.size()}};
}

}  // namespace

RunOutput run_experiment(const json& config) {
  const auto diags = validate_config(config);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + d;
    fail(ErrorKind::invalid_input, msg);
  }
  const std::string exp = config["experiment"].get<std::string>();
  const std::string hash = config_hash(config);
  const std::string comment = "config-hash: " + hash;
  std::ostringstream csv;
  json results;
  if (exp == "bands") results = run_bands(config, csv, comment);
  else if (exp == "disperse") results = run_disperse(config, csv, comment);
  else if (exp == "store") results = run_store(config, csv, comment);
  else if (exp == "retrieve") results = run_retrieve(config, csv, comment);
  else if (exp == "shape") results = run_shape(config, csv, comment);
  else if (exp == "spectrum") results = run_spectrum(config, csv, comment);
  else if (exp == "sidebands") results = run_sidebands(config, csv, comment);
  else if (exp == "steer") results = run_steer(config, csv, comment);
  else if (exp == "rabi") results = run_rabi(config, csv, comment);
  else if (exp == "cycle") results = run_cycle(config, csv, comment);
  else if (exp == "defects") results = run_defects(config, csv, comment);

  const std::filesystem::path dir = config["output"]["dir"].get<std::string>();
  std::filesystem::create_directories(dir);
  RunOutput out;
  out.csv_path = (dir / (exp + "-" + hash + ".csv")).string();
  out.json_path = (dir / (exp + "-" + hash + ".json")).string();
  out.summary = {{"experiment", exp}, {"config_hash", hash}, {"config", config}, {"results", results}};
  {
    std::ofstream f(out.csv_path, std::ios::binary);
    f << csv.str();
    if (!f) fail(ErrorKind::invalid_input, "cannot write " + out.csv_path);
  }
  {
    std::ofstream f(out.json_path, std::ios::binary);
    f << out.summary.dump(2) << "\n";
    if (!f) fail(ErrorKind::invalid_input, "cannot write " + out.json_path);
  }
  return out;
}

// ----------------------------------------------------------------------- CLI

namespace {

enum class FlagType { integer, number, text, list_text, list_number, raw_json, boolean };

struct Flag {
  std::string name;
  std::string path;
  FlagType type;
  std::string help;
};

std::vector<Flag> common_flags() {
  return {
      {"--nx", "lattice.nx", FlagType::integer, "atoms along x"},
      {"--ny", "lattice.ny", FlagType::integer, "atoms along y"},
      {"--spacing", "lattice.spacing", FlagType::number, "lattice spacing (lambda0)"},
      {"--dipole", "lattice.dipole", FlagType::text, "dipole: circular, x, y or z"},
      {"--defects", "lattice.defects", FlagType::raw_json, "holes as JSON [[x,y],...] in units of d"},
      {"--pattern", "pattern.kind", FlagType::text, "detuning pattern kind"},
      {"--params", "pattern.params", FlagType::raw_json, "pattern amplitudes as JSON, complex as [re,im]"},
      {"--dt", "dynamics.dt", FlagType::number, "integrator step (1/gamma0)"},
      {"--t-max", "dynamics.t_end", FlagType::number, "simulated time limit (1/gamma0)"},
      {"--t-storage", "dynamics.t_storage", FlagType::number, "storage time before retrieval"},
      {"--delta-store", "dynamics.Delta_store", FlagType::number, "storage detuning amplitude"},
      {"--delta-retrieve", "dynamics.Delta_retrieve", FlagType::number, "retrieval detuning amplitude"},
      {"--stop-norm", "dynamics.stop_norm", FlagType::number, "stop once the norm falls below this"},
      {"--record-every", "dynamics.record_every", FlagType::integer, "keep every n-th step"},
      {"--waist", "mode.waist", FlagType::number, "detection/storage waist in units of d"},
      {"--polarization", "mode.polarization", FlagType::text, "detection polarization"},
  };
}

std::vector<Flag> experiment_flags(const std::string& exp) {
  if (exp == "bands")
    return {{"--path", "bands.path", FlagType::list_text, "comma-separated symmetry points"},
            {"--samples", "bands.samples", FlagType::integer, "samples per segment"},
            {"--delta", "bands.Delta", FlagType::number, "checkerboard amplitude (0: Bravais bands)"},
            {"--folded", "bands.folded", FlagType::boolean, "add the folded branch"},
            {"--truncation", "bands.truncation", FlagType::number, "lattice-sum radius in units of d"}};
  if (exp == "disperse")
    return {{"--point", "disperse.point", FlagType::text, "symmetry point"},
            {"--k", "disperse.k", FlagType::raw_json, "explicit [kx, ky] (1/lambda0)"},
            {"--truncation", "disperse.truncation", FlagType::number, "lattice-sum radius in units of d"}};
  if (exp == "store") return {{"--store-pattern", "store.pattern", FlagType::text, "storage pattern kind"}};
  if (exp == "retrieve") return {{"--optimize", "retrieve.optimize", FlagType::boolean, "golden-section waist search"}};
  if (exp == "shape")
    return {{"--window", "shape.window", FlagType::text, "blackman, tukey, triangular or sine"},
            {"--t-end", "shape.t_end", FlagType::number, "window length (1/gamma0)"},
            {"--total", "shape.total", FlagType::number, "released excitation"},
            {"--taper", "shape.taper", FlagType::number, "tukey taper fraction"},
            {"--solver-dt", "shape.solver_dt", FlagType::number, "solver step"},
            {"--plateau", "shape.plateau", FlagType::number, "plateau detuning"},
            {"--cap", "shape.cap", FlagType::number, "detuning cap"},
            {"--tail", "shape.tail", FlagType::number, "simulated time after the window"}};
  if (exp == "spectrum")
    return {{"--delta", "spectrum.Delta", FlagType::number, "checkerboard amplitude"},
            {"--omega-min", "spectrum.omega_min", FlagType::number, "lowest frequency"},
            {"--omega-max", "spectrum.omega_max", FlagType::number, "highest frequency"},
            {"--omega-step", "spectrum.omega_step", FlagType::number, "frequency step"}};
  if (exp == "sidebands")
    return {{"--delta", "sidebands.Delta", FlagType::number, "checkerboard amplitude"},
            {"--mod-delta", "sidebands.delta", FlagType::number, "modulation depth"},
            {"--mod-omega", "sidebands.Omega", FlagType::number, "modulation frequency"},
            {"--max-order", "sidebands.max_order", FlagType::integer, "largest sideband order reported"}};
  if (exp == "steer") return {{"--theta-points", "steer.theta_points", FlagType::integer, "angular grid size"}};
  if (exp == "rabi")
    return {{"--delta", "rabi.Delta", FlagType::number, "stripe amplitude"},
            {"--phi-min", "rabi.Phi_min", FlagType::number, "dephasing angle for the quality factor"},
            {"--directions", "rabi.directions", FlagType::integer, "directions on the containment circle"}};
  if (exp == "defects")
    return {{"--sets", "defects.sets", FlagType::list_text, "comma-separated set names"},
            {"--waists", "defects.waists", FlagType::list_number, "comma-separated waists in units of d"}};
  return {};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

void set_path(json& c, const std::string& path, const json& value) {
  json* cur = &c;
  for (const auto& key : split(path, '.')) cur = &(*cur)[key];
  *cur = value;
}

json parse_flag(const Flag& f, const std::string& text) {
  switch (f.type) {
    case FlagType::integer: return std::stol(text);
    case FlagType::number: return std::stod(text);
    case FlagType::text: return text;
    case FlagType::boolean: return text == "true" || text == "1";
    case FlagType::list_text: return split(text, ',');
    case FlagType::list_number: {
      json a = json::array();
      for (const auto& s : split(text, ',')) a.push_back(std::stod(s));
      return a;
    }
    case FlagType::raw_json: return json::parse(text);
  }
  return nullptr;
}

json range_values(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) fail(ErrorKind::invalid_input, "--waist-sweep expects lo:hi:step");
  const double lo = std::stod(parts[0]), hi = std::stod(parts[1]), step = std::stod(parts[2]);
  if (!(step > 0.0) || hi < lo) fail(ErrorKind::invalid_input, "--waist-sweep expects lo <= hi and step > 0");
  json a = json::array();
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) a.push_back(lo + i * step);
  return a;
}

void print_error(std::ostream& err, ErrorKind kind, const std::string& message,
                 const std::vector<std::string>& diagnostics = {}) {
  json e = {{"error", {{"kind", to_string(kind)}, {"message", message}, {"exit_code", exit_code_for(kind)}}}};
  if (!diagnostics.empty()) e["error"]["diagnostics"] = diagnostics;
  err << e.dump() << "\n";
}

json load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::invalid_input, "cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_input, std::string("config file is not valid JSON: ") + e.what());
  }
}

struct SubState {
  std::string name;
  CLI::App* app = nullptr;
  std::string config_file;
  bool dry_run = false;
  std::string output_dir;
  int threads = -1;
  std::string waist_sweep;
  std::vector<std::string> sets;
  std::vector<Flag> flags;
  std::vector<std::string> values;
};

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Detuning-pattern control of dark states in sub-wavelength atom arrays"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<SubState>> subs;
  for (const auto& exp : experiment_kinds()) {
    auto st = std::make_unique<SubState>();
    st->name = exp;
    st->app = app.add_subcommand(exp, "run the " + exp + " experiment");
    st->app->add_option("--config", st->config_file, "JSON config file");
    st->app->add_flag("--dry-run", st->dry_run, "validate and print the resolved config only");
    st->app->add_option("--output-dir", st->output_dir, "directory for CSV and JSON outputs");
    st->app->add_option("--threads", st->threads, "worker threads for sweeps (0: automatic)");
    st->app->add_option("--set", st->sets, "override any key: path.to.key=JSON");
    st->flags = common_flags();
    for (const auto& f : experiment_flags(exp)) {
      // Experiment-specific flags shadow common ones of the same name.
      std::erase_if(st->flags, [&](const Flag& g) { return g.name == f.name; });
      st->flags.push_back(f);
    }
    st->values.resize(st->flags.size());
    for (std::size_t i = 0; i < st->flags.size(); ++i) {
      if (st->flags[i].type == FlagType::boolean)
        st->app->add_flag_function(
            st->flags[i].name, [st = st.get(), i](std::int64_t) { st->values[i] = "true"; }, st->flags[i].help);
      else
        st->app->add_option(st->flags[i].name, st->values[i], st->flags[i].help);
    }
    if (exp == "retrieve")
      st->app->add_option("--waist-sweep", st->waist_sweep, "sweep waist/d as lo:hi:step");
    subs.push_back(std::move(st));
  }
  std::string validate_file;
  std::string validate_exp;
  auto* validate = app.add_subcommand("validate", "check a config file and list diagnostics");
  validate->add_option("--config", validate_file, "JSON config file")->required();
  validate->add_option("--experiment", validate_exp, "experiment kind if the file does not name one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      json file = load_file(validate_file);
      std::string exp = validate_exp;
      if (exp.empty() && file.is_object() && file.contains("experiment") && file["experiment"].is_string())
        exp = file["experiment"].get<std::string>();
      json cfg = default_config(exp);
      merge_config(cfg, file);
      if (!validate_exp.empty()) cfg["experiment"] = validate_exp;
      const auto diags = validate_config(cfg);
      for (const auto& d : diags) std::cout << d << "\n";
      if (diags.empty()) {
        std::cout << "ok " << config_hash(cfg) << "\n";
        return 0;
      }
      print_error(std::cerr, ErrorKind::invalid_input, "config failed validation", diags);
      return 2;
    }
    for (auto& st : subs) {
      if (!st->app->parsed()) continue;
      json cfg = default_config(st->name);
      if (!st->config_file.empty()) merge_config(cfg, load_file(st->config_file));
      cfg["experiment"] = st->name;
      for (std::size_t i = 0; i < st->flags.size(); ++i) {
        if (st->values[i].empty()) continue;
        try {
          set_path(cfg, st->flags[i].path, parse_flag(st->flags[i], st->values[i]));
        } catch (const std::exception&) {
          fail(ErrorKind::invalid_input, st->flags[i].name + " has an invalid value '" + st->values[i] + "'");
        }
      }
      if (!st->waist_sweep.empty()) {
        set_path(cfg, "sweep.parameter", "waist");
        set_path(cfg, "sweep.values", range_values(st->waist_sweep));
      }
      for (const auto& s : st->sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(ErrorKind::invalid_input, "--set expects path=value");
        json v;
        try {
          v = json::parse(s.substr(eq + 1));
        } catch (const json::exception&) {
          v = s.substr(eq + 1);
        }
        set_path(cfg, s.substr(0, eq), v);
      }
      if (!st->output_dir.empty()) cfg["output"]["dir"] = st->output_dir;
      if (st->threads >= 0) cfg["threads"] = st->threads;

      const auto diags = validate_config(cfg);
      if (st->dry_run) {
        json out = {{"config", cfg}, {"config_hash", config_hash(cfg)}, {"diagnostics", diags}};
        std::cout << out.dump(2) << "\n";
        if (!diags.empty()) {
          print_error(std::cerr, ErrorKind::invalid_input, "config failed validation", diags);
          return 2;
        }
        return 0;
      }
      if (!diags.empty()) {
        print_error(std::cerr, ErrorKind::invalid_input, "config failed validation", diags);
        return 2;
      }
      if (cfg["threads"].get<int>() > 0) {
        const std::string t = std::to_string(cfg["threads"].get<int>());
        ::setenv("DARKLATTICE_THREADS", t.c_str(), 1);
      }
      const RunOutput out = run_experiment(cfg);
      std::cout << out.csv_path << "\n" << out.json_path << "\n";
      return 0;
    }
  } catch (const Error& e) {
    print_error(std::cerr, e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    print_error(std::cerr, ErrorKind::consistency, e.what());
    return 5;
  }
  return 0;
}

}  // namespace darklattice
