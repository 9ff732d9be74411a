#include "starnls/scenario.hpp"

#include <omp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "starnls/profiles.hpp"
#include "starnls/symmetry.hpp"

namespace starnls {

namespace fs = std::filesystem;

namespace {

// One mapping of the config with its dotted path, for field-level messages.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::string origin)
      : node_(std::move(node)), path_(std::move(path)), origin_(std::move(origin)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      fail_at(node_, "'" + path_ + "' must be a mapping");
  }

  bool present() const { return node_ && !node_.IsNull(); }

  bool has(const std::string& key) {
    known_.insert(key);
    return present() && node_[key] && !node_[key].IsNull();
  }

  template <typename T>
  T req(const std::string& key) {
    if (!has(key)) fail_at(node_, "missing required field '" + field(key) + "'");
    return as<T>(key);
  }

  template <typename T>
  T opt(const std::string& key, T fallback) {
    return has(key) ? as<T>(key) : fallback;
  }

  std::vector<double> list(const std::string& key) {
    if (!has(key)) return {};
    const YAML::Node n = node_[key];
    if (!n.IsSequence()) fail_at(n, "'" + field(key) + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : n) {
      try {
        out.push_back(item.as<double>());
      } catch (const YAML::Exception&) {
        fail_at(item, "'" + field(key) + "' entries must be numbers");
      }
    }
    return out;
  }

  Section sub(const std::string& key) {
    known_.insert(key);
    return Section(present() ? node_[key] : YAML::Node(), field(key), origin_);
  }

  YAML::Node raw(const std::string& key) {
    known_.insert(key);
    return present() ? node_[key] : YAML::Node();
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known_.count(key)) fail_at(kv.first, "unknown field '" + field(key) + "'");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    fail_at(present() && node_[key] ? node_[key] : node_, "'" + field(key) + "' " + what);
  }

  [[noreturn]] void fail_at(const YAML::Node& n, const std::string& what) const {
    std::ostringstream msg;
    msg << origin_;
    if (n && n.Mark().line >= 0) msg << ":" << n.Mark().line + 1;
    msg << ": " << what;
    throw ConfigError(msg.str());
  }

 private:
  template <typename T>
  T as(const std::string& key) {
    const YAML::Node n = node_[key];
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(n, "'" + field(key) + "' has the wrong type");
    }
  }

  YAML::Node node_;
  std::string path_;
  std::string origin_;
  std::set<std::string> known_;
};

YAML::Node load_yaml(const std::string& text, const std::string& origin) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream msg;
    msg << origin << ":" << e.mark.line + 1 << ": parse error: " << e.msg;
    throw ConfigError(msg.str());
  }
}

LinearMethod parse_method(Section& s, const std::string& key) {
  const auto name = s.opt<std::string>(key, "direct_cn");
  if (name == "direct_cn") return LinearMethod::direct_cn;
  if (name == "q_conjugated") return LinearMethod::q_conjugated;
  s.fail(key, "must be 'direct_cn' or 'q_conjugated'");
}

InitialDataSpec::Kind parse_kind(Section& s) {
  const auto name = s.req<std::string>("type");
  if (name == "edge_soliton") return InitialDataSpec::Kind::edge_soliton;
  if (name == "radial_soliton") return InitialDataSpec::Kind::radial_soliton;
  if (name == "gaussian") return InitialDataSpec::Kind::gaussian;
  if (name == "profile_sum") return InitialDataSpec::Kind::profile_sum;
  if (name == "file") return InitialDataSpec::Kind::file;
  s.fail("type", "must be one of edge_soliton, radial_soliton, gaussian, profile_sum, file");
}

int parse_edge(Section& s, int n_edges) {
  const int e = s.opt<int>("edge", 1);
  if (e < 1 || e > n_edges) s.fail("edge", "must lie in 1.." + std::to_string(n_edges));
  return e;
}

ProfileEntry parse_profile(const YAML::Node& node, const std::string& path, const std::string& origin,
                           int n_edges) {
  Section s(node, path, origin);
  ProfileEntry e;
  e.t_shift = s.opt<double>("t", 0.0);
  e.y_shift = s.opt<double>("y", 0.0);
  if (e.y_shift < 0.0) s.fail("y", "must be >= 0");
  e.edge = parse_edge(s, n_edges);
  e.shape = s.opt<std::string>("shape", "gaussian");
  if (e.shape != "gaussian" && e.shape != "sech" && e.shape != "bump")
    s.fail("shape", "must be gaussian, sech or bump");
  e.width = s.opt<double>("width", 1.0);
  if (!(e.width > 0.0)) s.fail("width", "must be > 0");
  e.amplitude = s.opt<double>("amplitude", 1.0);
  e.velocity = s.opt<double>("velocity", 0.0);
  s.finish();
  return e;
}

// {perm: [1-based edge indices], phase: [re, im]}; (g u)_k = phase u_{perm[k]}.
GroupElement parse_generator(const YAML::Node& node, const std::string& path, const std::string& origin,
                             int n_edges) {
  Section s(node, path, origin);
  if (!s.present()) s.fail_at(node, "'" + path + "' must be a mapping with 'perm'");
  if (!s.has("perm")) s.fail_at(node, "missing required field '" + s.field("perm") + "'");
  const std::vector<double> perm = s.list("perm");
  if (int(perm.size()) != n_edges) s.fail("perm", "must list " + std::to_string(n_edges) + " edges");
  GroupElement g;
  std::vector<bool> seen(size_t(n_edges), false);
  for (double v : perm) {
    const int e = int(v);
    if (double(e) != v || e < 1 || e > n_edges || seen[size_t(e - 1)])
      s.fail("perm", "must be a permutation of 1.." + std::to_string(n_edges));
    seen[size_t(e - 1)] = true;
    g.perm.push_back(e - 1);
  }
  if (s.has("phase")) {
    const std::vector<double> ph = s.list("phase");
    if (ph.size() != 2) s.fail("phase", "must be [re, im]");
    g.phase = cplx(ph[0], ph[1]);
    if (std::abs(std::abs(g.phase) - 1.0) > 1e-12) s.fail("phase", "must have modulus 1");
  }
  s.finish();
  return g;
}

Scenario parse_root(const YAML::Node& root, const std::string& origin) {
  Section top(root, "", origin);
  if (!top.present()) throw ConfigError(origin + ": empty config");
  Scenario sc;

  Section model = top.sub("model");
  if (!model.present()) top.fail_at(root, "missing required section 'model'");
  const int n_edges = model.opt<int>("edges", 3);
  const double gamma = model.opt<double>("gamma", 0.0);
  const double p = model.req<double>("p");
  const int mu = model.opt<int>("mu", -1);
  const double omega = model.opt<double>("omega", 1.0);
  if (n_edges < 1) model.fail("edges", "must be >= 1");
  if (gamma < 0.0) model.fail("gamma", "must be >= 0");
  if (!(p > 1.0)) model.fail("p", "must be > 1");
  if (mu != 1 && mu != -1) model.fail("mu", "must be -1 (focusing) or +1 (defocusing)");
  if (!(omega > 0.0)) model.fail("omega", "must be > 0");
  model.finish();
  sc.model = ModelParams(n_edges, gamma, p, mu, omega);

  Section grid = top.sub("grid");
  const double length = grid.opt<double>("length", 60.0);
  if (!(length > 0.0)) grid.fail("length", "must be > 0");
  FarBoundary boundary;
  const auto bname = grid.opt<std::string>("boundary", "dirichlet");
  if (bname == "absorbing") {
    const double w = grid.opt<double>("absorbing_width", 0.1 * length);
    const double s = grid.opt<double>("absorbing_strength", 5.0);
    if (!(w > 0.0) || w >= length) grid.fail("absorbing_width", "must lie in (0, length)");
    if (!(s > 0.0)) grid.fail("absorbing_strength", "must be > 0");
    boundary = FarBoundary::absorbing(w, s);
  } else if (bname != "dirichlet") {
    grid.fail("boundary", "must be 'dirichlet' or 'absorbing'");
  }
  if (grid.has("points") && grid.has("h")) grid.fail("h", "conflicts with 'points'; give one");
  if (grid.has("points")) {
    const int points = grid.req<int>("points");
    if (points < 16) grid.fail("points", "must be >= 16");
    sc.grid = EdgeGrid(length, points, boundary);
  } else {
    const double h = grid.opt<double>("h", 0.02);
    if (!(h > 0.0) || h > length / 15.0) grid.fail("h", "must be > 0 and give at least 16 points");
    sc.grid = EdgeGrid::with_spacing(length, h, boundary);
  }
  grid.finish();

  Section ini = top.sub("initial");
  if (!ini.present()) top.fail_at(root, "missing required section 'initial'");
  auto& id = sc.initial;
  id.kind = parse_kind(ini);
  id.scale = ini.opt<double>("scale", 1.0);
  id.velocity = ini.opt<double>("velocity", 0.0);
  switch (id.kind) {
    case InitialDataSpec::Kind::edge_soliton:
      id.edge = parse_edge(ini, n_edges);
      id.y = ini.opt<double>("y", 0.0);
      break;
    case InitialDataSpec::Kind::radial_soliton:
      break;
    case InitialDataSpec::Kind::gaussian:
      id.radial = ini.opt<bool>("radial", false);
      id.edge = parse_edge(ini, n_edges);
      id.width = ini.opt<double>("width", 1.0);
      if (!(id.width > 0.0)) ini.fail("width", "must be > 0");
      id.center = ini.opt<double>("center", 0.0);
      id.amplitude = ini.opt<double>("amplitude", 1.0);
      break;
    case InitialDataSpec::Kind::profile_sum: {
      const YAML::Node list = ini.raw("profiles");
      if (!list || !list.IsSequence() || list.size() == 0)
        ini.fail("profiles", "must be a non-empty list");
      for (size_t i = 0; i < list.size(); ++i)
        id.profiles.push_back(parse_profile(list[i], ini.field("profiles") + "[" + std::to_string(i) + "]",
                                            origin, n_edges));
      break;
    }
    case InitialDataSpec::Kind::file:
      id.path = ini.req<std::string>("path");
      break;
  }
  ini.finish();

  Section ev = top.sub("evolve");
  auto& cfg = sc.evolve;
  cfg.dt = ev.opt<double>("dt", 0.01);
  if (!(cfg.dt > 0.0)) ev.fail("dt", "must be > 0");
  cfg.t_end = ev.opt<double>("t_end", 1.0);
  if (!(cfg.t_end >= 0.0)) ev.fail("t_end", "must be >= 0");
  cfg.store_stride = ev.opt<int>("store_stride", 10);
  if (cfg.store_stride < 1) ev.fail("store_stride", "must be >= 1");
  cfg.blowup_h1_factor = ev.opt<double>("blowup_h1_factor", 1e3);
  if (!(cfg.blowup_h1_factor > 1.0)) ev.fail("blowup_h1_factor", "must be > 1");
  cfg.adapt = ev.opt<bool>("adapt", false);
  cfg.min_dt = ev.opt<double>("min_dt", 1e-7);
  cfg.method = parse_method(ev, "method");
  {
    const auto name = ev.opt<std::string>("splitting", "suzuki4");
    if (name == "strang") cfg.splitting = Splitting::strang;
    else if (name == "suzuki4") cfg.splitting = Splitting::suzuki4;
    else ev.fail("splitting", "must be 'strang' or 'suzuki4'");
  }
  cfg.nonlinear = ev.opt<bool>("nonlinear", true);
  cfg.abort_on_contamination = ev.opt<bool>("abort_on_contamination", true);
  ev.finish();

  Section dg = top.sub("diagnostics");
  auto& d = sc.diagnostics;
  d.dichotomy = dg.opt<bool>("dichotomy", true);
  d.virial_radii = dg.list("virial");
  for (double r : d.virial_radii)
    if (!(r > 0.0)) dg.fail("virial", "radii must be > 0");
  d.scattering = dg.opt<bool>("scattering", false);
  if (dg.has("symmetry")) {
    const YAML::Node sym = dg.raw("symmetry");
    if (sym.IsScalar()) {
      d.symmetry_group = sym.as<std::string>();
      if (n_edges != 3) dg.fail("symmetry", "named groups are defined for 3 edges only");
      try {
        d.symmetry_elements = groups::by_name(d.symmetry_group);
      } catch (const std::invalid_argument&) {
        dg.fail("symmetry", "must be sigma, g23, g23_tilde, sigma_tilde or a list of generators");
      }
    } else if (sym.IsSequence() && sym.size() > 0) {
      d.symmetry_group = "custom";
      std::vector<GroupElement> gens;
      for (size_t i = 0; i < sym.size(); ++i)
        gens.push_back(parse_generator(sym[i], dg.field("symmetry") + "[" + std::to_string(i) + "]",
                                       origin, n_edges));
      try {
        d.symmetry_elements = generate_group(gens);
      } catch (const std::exception& e) {
        dg.fail("symmetry", std::string("generators do not close: ") + e.what());
      }
    } else {
      dg.fail("symmetry", "must be a group name or a non-empty list of generators");
    }
  }
  d.dispersive_times = dg.list("dispersive");
  for (double t : d.dispersive_times)
    if (!(t > 0.0)) dg.fail("dispersive", "times must be > 0");
  dg.finish();

  Section out = top.sub("output");
  sc.outputs.directory = out.opt<std::string>("directory", "out");
  sc.outputs.csv = out.opt<bool>("csv", true);
  sc.outputs.json = out.opt<bool>("json", true);
  sc.outputs.svg = out.opt<bool>("svg", false);
  sc.outputs.snapshots = out.opt<bool>("snapshots", false);
  out.finish();

  sc.seed = top.opt<std::uint64_t>("seed", 1);
  (void)top.raw("sweep");
  top.finish();
  return sc;
}

cplx boost(double v, double x) { return std::polar(1.0, v * x); }

double shape_value(const std::string& shape, double width, double x) {
  const double s = x / width;
  if (shape == "sech") return 1.0 / std::cosh(s);
  if (shape == "bump") return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 4) : 0.0;
  return std::exp(-0.5 * s * s);
}

std::string initial_summary(const InitialDataSpec& id) {
  std::ostringstream os;
  os << to_string(id.kind) << " scale=" << io::fmt(id.scale);
  return os.str();
}

}  // namespace

const char* to_string(InitialDataSpec::Kind kind) {
  switch (kind) {
    case InitialDataSpec::Kind::edge_soliton: return "edge_soliton";
    case InitialDataSpec::Kind::radial_soliton: return "radial_soliton";
    case InitialDataSpec::Kind::gaussian: return "gaussian";
    case InitialDataSpec::Kind::profile_sum: return "profile_sum";
    case InitialDataSpec::Kind::file: return "file";
  }
  return "unknown";
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  return parse_root(load_yaml(text, origin), origin);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario_text(buf.str(), path);
  sc.base_dir = fs::path(path).parent_path().string();
  if (sc.base_dir.empty()) sc.base_dir = ".";
  return sc;
}

SweepGrid parse_sweep_text(const std::string& text, const Scenario& base, const std::string& origin) {
  const YAML::Node root = load_yaml(text, origin);
  Section top(root, "", origin);
  Section sw = top.sub("sweep");
  if (!sw.present()) top.fail_at(root, "missing required section 'sweep'");
  SweepGrid g;
  g.scales = sw.has("scale") ? sw.list("scale") : std::vector<double>{base.initial.scale};
  g.gammas = sw.has("gamma") ? sw.list("gamma") : std::vector<double>{base.model.gamma()};
  g.ps = sw.has("p") ? sw.list("p") : std::vector<double>{base.model.p()};
  for (double gm : g.gammas)
    if (gm < 0.0) sw.fail("gamma", "values must be >= 0");
  for (double p : g.ps)
    if (!(p > 1.0)) sw.fail("p", "values must be > 1");
  sw.finish();
  return g;
}

GraphFunction build_initial_data(const Scenario& sc) {
  const auto& id = sc.initial;
  const auto& mp = sc.model;
  const int n = mp.n_edges();
  const int designated = id.edge - 1;
  const double p = mp.p(), omega = mp.omega();
  GraphFunction f(sc.grid, n);
  switch (id.kind) {
    case InitialDataSpec::Kind::edge_soliton:
      f = GraphFunction::sample(sc.grid, n, [&](int k, double x) {
        if (k == designated) return soliton_value(p, omega, x - id.y) * boost(id.velocity, x);
        return cplx(soliton_value(p, omega, x + id.y));
      });
      break;
    case InitialDataSpec::Kind::radial_soliton:
      f = GraphFunction::sample(sc.grid, n, [&](int, double x) {
        return soliton_value(p, omega, x) * boost(id.velocity, x);
      });
      break;
    case InitialDataSpec::Kind::gaussian:
      f = GraphFunction::sample(sc.grid, n, [&](int k, double x) {
        const double z = (id.radial || k == designated) ? x - id.center : x + id.center;
        const cplx phase = (id.radial || k == designated) ? boost(id.velocity, x) : cplx(1.0);
        return id.amplitude * std::exp(-0.5 * z * z / (id.width * id.width)) * phase;
      });
      break;
    case InitialDataSpec::Kind::profile_sum: {
      const LinearPropagatorConfig lcfg{sc.evolve.dt, sc.evolve.method, mp.gamma()};
      for (const auto& e : id.profiles) {
        ProfileSpec spec;
        spec.t_shift = e.t_shift;
        spec.y_shift = e.y_shift;
        spec.psis.assign(size_t(n), LineFunction(sc.grid));
        spec.psis[size_t(e.edge - 1)] = LineFunction::sample(sc.grid, [&](double x) {
          return e.amplitude * shape_value(e.shape, e.width, x) * boost(e.velocity, x);
        });
        f += shift_profile(spec, mp.gamma(), lcfg);
      }
      break;
    }
    case InitialDataSpec::Kind::file: {
      const fs::path path = fs::path(id.path).is_absolute() ? fs::path(id.path)
                                                            : fs::path(sc.base_dir) / id.path;
      GraphFunction g = io::read_snapshot_file(path.string());
      if (g.n_edges() != n) throw ConfigError("initial.path: snapshot edge count differs from model.edges");
      if (g.n_points() != sc.grid.n_points() || std::abs(g.grid().h() - sc.grid.h()) > 1e-12 * sc.grid.h())
        throw ConfigError("initial.path: snapshot grid differs from the scenario grid");
      f = GraphFunction(sc.grid, n);
      for (size_t i = 0; i < f.flat().size(); ++i) f.flat()[i] = g.flat()[i];
      break;
    }
  }
  if (id.scale != 1.0) f *= id.scale;
  for (int k = 0; k < n; ++k) f.at(k, sc.grid.n_points() - 1) = 0.0;
  return f;
}

ScenarioResult execute_scenario(const Scenario& sc) {
  ScenarioResult r;
  const auto& mp = sc.model;
  const GraphFunction f0 = build_initial_data(sc);
  r.trajectory = evolve_nls(f0, mp, sc.evolve);
  const auto& traj = r.trajectory;

  r.omega_star = mp.omega();
  if (mp.p() > 5.0) {
    r.thresholds = threshold_table(mp);
    if (mp.mu() < 0) {
      const double m0 = traj.diagnostics.front().mass;
      if (m0 > 0.0) r.omega_star = tangent_frequency(m0, *r.thresholds);
      if (sc.diagnostics.dichotomy) r.verdict = classify_potential_well(f0, mp, *r.thresholds);
    }
  }
  for (double R : sc.diagnostics.virial_radii) r.virial.push_back(localized_virial(traj, mp, R));
  if (!sc.diagnostics.virial_radii.empty() && mp.mu() < 0)
    r.blowup = blowup_diagnostic(traj, mp, sc.diagnostics.virial_radii.front());
  if (sc.diagnostics.scattering) r.scattering = scattering_diagnostic(traj, mp);
  if (!sc.diagnostics.symmetry_elements.empty())
    r.symmetry_drift = invariance_drift(traj, sc.diagnostics.symmetry_elements);
  if (!sc.diagnostics.dispersive_times.empty()) {
    const LinearPropagatorConfig lcfg{sc.evolve.dt, sc.evolve.method, mp.gamma()};
    r.dispersive = dispersive_ratio(f0, sc.diagnostics.dispersive_times, lcfg, &r.trajectory.flags);
  }
  if (traj.termination == Termination::boundary_contaminated) r.exit_status = 3;
  if (traj.termination == Termination::non_finite) r.exit_status = 4;
  return r;
}

io::CsvTable diagnostics_table(const ScenarioResult& r, const Scenario&) {
  std::vector<std::string> header = {
      "t [time]",
      "M [mass ||u||_2^2]",
      "E_gamma [energy]",
      "S_omega* [action at tangent frequency]",
      "K_gamma [virial functional]",
      "H1_gamma [norm ||u||_H1_gamma]",
      "Linf [sum of edge sup norms]",
  };
  for (const auto& v : r.virial) {
    const std::string tag = "R=" + io::fmt(v.R);
    header.push_back("V_" + tag + " [localized virial]");
    header.push_back("dV/dt_" + tag + " [virial rate]");
    header.push_back("d2V/dt2_" + tag + " [virial acceleration]");
  }
  io::CsvTable table(header);
  const auto& traj = r.trajectory;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const auto& d = traj.diagnostics[i];
    std::vector<double> row = {traj.times[i],
                               d.mass,
                               d.energy,
                               d.energy + 0.5 * r.omega_star * d.mass,
                               d.virial_k,
                               std::sqrt(d.h1gamma),
                               norm_linf_sum(traj.states[i])};
    for (const auto& v : r.virial) {
      const bool in = i < v.v.size();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.push_back(in ? v.v[i] : nan);
      row.push_back(in ? v.dv_formula[i] : nan);
      row.push_back(in ? v.d2v_formula[i] : nan);
    }
    table.add_row(std::move(row));
  }
  return table;
}

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json series(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

std::string verdict_json(const ScenarioResult& r, const Scenario& sc) {
  const auto& mp = sc.model;
  const auto& traj = r.trajectory;
  Json j;
  j["model"] = {{"edges", mp.n_edges()}, {"gamma", mp.gamma()}, {"p", mp.p()},
                {"mu", mp.mu()},         {"omega", mp.omega()}, {"s_c", mp.s_c()}};
  j["grid"] = {{"length", sc.grid.length()}, {"n_points", sc.grid.n_points()}, {"h", sc.grid.h()}};
  j["initial"] = initial_summary(sc.initial);
  j["seed"] = sc.seed;
  if (r.verdict) {
    const auto& v = *r.verdict;
    j["verdict"] = {{"side", to_string(v.side)},        {"me_product", num(v.me_product)},
                    {"me_margin", num(v.me_margin)},    {"k2_product", num(v.k2_product)},
                    {"k2_margin", num(v.k2_margin)},    {"virial_K", num(v.virial_k)},
                    {"consistent", v.consistent}};
  } else {
    j["verdict"] = nullptr;
  }
  if (r.thresholds) {
    const auto& t = *r.thresholds;
    j["thresholds"] = {{"M_Q", num(t.m_line_q)},          {"grad_Q", num(t.grad_line_q)},
                       {"E0_Q", num(t.e_line_q)},         {"me_threshold", num(t.me_threshold)},
                       {"k2_threshold", num(t.k2_threshold)}, {"n_omega", num(t.n_omega)},
                       {"C_GN_line", num(t.c_gn_line)},   {"omega_star", num(r.omega_star)}};
  } else {
    j["thresholds"] = nullptr;
  }
  j["termination"] = {{"kind", to_string(traj.termination)},
                      {"time", num(traj.termination_time)},
                      {"contamination_time", num(traj.contamination_time)},
                      {"steps", traj.steps},
                      {"final_dt", num(traj.final_dt)}};
  j["conservation"] = {
      {"mass_drift", num(traj.mass_drift.empty() ? 0.0 : traj.mass_drift.back())},
      {"energy_drift", num(traj.energy_drift.empty() ? 0.0 : traj.energy_drift.back())}};
  if (r.scattering) {
    const auto& s = *r.scattering;
    j["scattering"] = {{"applicable", s.applicable},
                       {"cauchy_tail_after_10", num(s.tail_sum(10.0))},
                       {"times", series(s.times)},
                       {"cauchy_residuals", series(s.cauchy_residuals)}};
  }
  if (r.blowup) {
    const auto& b = *r.blowup;
    j["blowup"] = {{"kind", to_string(b.kind)},
                   {"concavity_onset", num(b.concavity_onset)},
                   {"certificate_fraction", num(b.certificate_fraction)},
                   {"eps_R", num(b.eps_r)},
                   {"t_star", num(b.t_star)},
                   {"h1_growth", num(b.h1_growth)}};
  }
  if (!r.symmetry_drift.empty()) {
    j["symmetry"] = {{"group", sc.diagnostics.symmetry_group},
                     {"order", sc.diagnostics.symmetry_elements.size()},
                     {"max_drift", num(*std::max_element(r.symmetry_drift.begin(), r.symmetry_drift.end()))}};
  }
  if (!sc.diagnostics.dispersive_times.empty()) {
    j["dispersive"] = {{"times", series(sc.diagnostics.dispersive_times)}, {"ratio", series(r.dispersive)}};
  }
  j["flags"] = traj.flags.messages;
  j["exit_status"] = r.exit_status;
  return j.dump(2) + "\n";
}

int run_scenario(const Scenario& sc, const std::string& out_dir) {
  const ScenarioResult r = execute_scenario(sc);
  fs::path dir = out_dir.empty() ? fs::path(sc.outputs.directory) : fs::path(out_dir);
  fs::create_directories(dir);
  if (sc.outputs.csv) {
    std::ofstream out(dir / "diagnostics.csv");
    diagnostics_table(r, sc).write(out);
    if (r.scattering) {
      io::CsvTable t({"t [time]", "cauchy_residual [sqrt(M + H1_gamma^2)]", "Linf [sum of edge sup norms]",
                      "strichartz_accumulation [space-time norm]"});
      const auto& s = *r.scattering;
      for (size_t i = 0; i < s.times.size(); ++i) {
        auto at = [&](const std::vector<double>& v) {
          return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
        };
        t.add_row({s.times[i], at(s.cauchy_residuals), at(s.linfty_decay), at(s.strichartz_accumulation)});
      }
      std::ofstream sout(dir / "scattering.csv");
      t.write(sout);
    }
  }
  if (sc.outputs.json) {
    std::ofstream out(dir / "verdict.json");
    out << verdict_json(r, sc);
  }
  if (sc.outputs.snapshots) {
    fs::create_directories(dir / "snapshots");
    const auto& states = r.trajectory.states;
    for (size_t i = 0; i < states.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "state_%06zu.txt", i);
      io::write_snapshot_file((dir / "snapshots" / name).string(), states[i]);
    }
  }
  if (sc.outputs.svg) {
    const auto& traj = r.trajectory;
    std::vector<io::PlotSeries> ps(3);
    ps[0].label = "M(t)";
    ps[1].label = "E_gamma(t)";
    ps[2].label = "||u(t)||_H1_gamma";
    for (size_t i = 0; i < traj.times.size(); ++i) {
      for (auto& s : ps) s.x.push_back(traj.times[i]);
      ps[0].y.push_back(traj.diagnostics[i].mass);
      ps[1].y.push_back(traj.diagnostics[i].energy);
      ps[2].y.push_back(std::sqrt(traj.diagnostics[i].h1gamma));
    }
    for (const auto& v : r.virial) ps.push_back({"V_R(t), R = " + io::fmt(v.R), v.t, v.v});
    if (r.scattering)
      ps.push_back({"Cauchy residual", r.scattering->times, r.scattering->cauchy_residuals});
    std::ofstream out(dir / "plots.svg");
    out << io::svg_plot("starnls scenario", ps);
  }
  return r.exit_status;
}

int worker_budget() {
  if (const char* env = std::getenv("STARNLS_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && w >= 1) return int(w);
  }
  return omp_get_max_threads();
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepGrid& grid, int workers) {
  struct Cell {
    double scale, gamma, p;
  };
  std::vector<Cell> cells;
  for (double p : grid.ps)
    for (double g : grid.gammas)
      for (double s : grid.scales) cells.push_back({s, g, p});
  std::vector<SweepRow> rows(cells.size());
  if (cells.empty()) return rows;
  const int w = workers > 0 ? workers : worker_budget();
  const double tail_from = std::min(10.0, 0.5 * base.evolve.t_end);
#pragma omp parallel for schedule(dynamic) num_threads(w)
  for (long c = 0; c < long(cells.size()); ++c) {
    auto& row = rows[size_t(c)];
    const auto& cell = cells[size_t(c)];
    row.scale = cell.scale;
    row.gamma = cell.gamma;
    row.p = cell.p;
    try {
      Scenario sc = base;
      sc.model = base.model.with_gamma(cell.gamma).with_p(cell.p);
      sc.initial.scale = cell.scale;
      sc.diagnostics.scattering = true;
      sc.diagnostics.dispersive_times.clear();
      const ScenarioResult r = execute_scenario(sc);
      const auto& traj = r.trajectory;
      row.verdict = r.verdict ? to_string(r.verdict->side) : "n/a";
      row.me_margin = r.verdict ? r.verdict->me_margin : std::numeric_limits<double>::quiet_NaN();
      row.k2_margin = r.verdict ? r.verdict->k2_margin : std::numeric_limits<double>::quiet_NaN();
      row.mass_drift = traj.mass_drift.empty() ? 0.0 : traj.mass_drift.back();
      row.energy_drift = traj.energy_drift.empty() ? 0.0 : traj.energy_drift.back();
      row.termination = to_string(traj.termination);
      row.termination_time = traj.termination_time;
      row.final_h1 = std::sqrt(traj.diagnostics.back().h1gamma);
      row.cauchy_tail = r.scattering ? r.scattering->tail_sum(tail_from) : 0.0;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  }
  return rows;
}

io::CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  io::CsvTable t({"scale [amplitude factor]", "gamma [vertex strength]", "p [power]", "status",
                  "verdict [well side]", "me_margin [relative]", "k2_margin [relative]",
                  "mass_drift [relative]", "energy_drift [relative]", "termination",
                  "termination_time [time]", "final_H1_gamma [norm]", "cauchy_tail [sqrt(M + H1_gamma^2)]",
                  "error"});
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    t.add_text_row({io::fmt(r.scale), io::fmt(r.gamma), io::fmt(r.p), r.ok ? "ok" : "failed",
                    r.verdict, io::fmt(r.me_margin), io::fmt(r.k2_margin), io::fmt(r.mass_drift),
                    io::fmt(r.energy_drift), r.termination, io::fmt(r.termination_time),
                    io::fmt(r.final_h1), io::fmt(r.cauchy_tail), err});
  }
  return t;
}

}  // namespace starnls
