#include "redmash/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "redmash/errors.hpp"
#include "redmash/units.hpp"

namespace redmash {

using nlohmann::json;

double default_dt(ModelKind model, Method method) {
  if (model == ModelKind::cavity) return 10.0;
  return method == Method::mash ? 0.0005 : 0.01;
}

double default_t_max(ModelKind model) {
  return model == ModelKind::cavity ? 120.0 * units::femtosecond : 20.0;
}

double Config::dt() const { return run.dt.value_or(default_dt(model, run.method)); }
double Config::t_max() const { return run.t_max.value_or(default_t_max(model)); }

void Config::validate() const {
  if (model == ModelKind::spin_boson) {
    spin_boson.validate();
  } else {
    cavity.validate();
    if (run.method == Method::redfield || run.method == Method::unravel) {
      throw ConfigInvalid(std::string("method ") + to_string(run.method) +
                          " needs a static system; the cavity model has a moving nuclear coordinate");
    }
  }
  if (!(dt() > 0.0)) throw ConfigInvalid("run.dt must be positive");
  if (!(t_max() > 0.0)) throw ConfigInvalid("run.t_max must be positive");
  if (run.n_traj < 2) throw ConfigInvalid("run.n_traj must be at least 2");
  if (run.n_output < 2) throw ConfigInvalid("run.n_output must be at least 2");
  if (run.bisections < 1) throw ConfigInvalid("run.bisections must be at least 1");
}

namespace {

// Reads the keys of one JSON object, remembering which were consumed so that
// leftovers can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigInvalid(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void number(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        if (!v->is_number()) fail(key, "expected a number or null");
        out = v->get<double>();
      }
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = take(key)) {
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else if (v->is_number_float() && v->get<double>() >= 0.0 &&
                 v->get<double>() == static_cast<double>(static_cast<std::uint64_t>(v->get<double>()))) {
        out = static_cast<Int>(v->get<double>());
      } else {
        fail(key, "expected a nonnegative integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  Section child(const std::string& key) {
    const json* v = take(key);
    return Section(*v, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigInvalid(field(it.key()) + ": unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigInvalid(field(key) + ": " + what);
  }

 private:
  const json* take(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_bath(Section s, DebyeBathSpec& b) {
  s.number("lambda", b.lambda);
  s.number("omega_c", b.omega_c);
  s.integer("n_modes", b.n_modes);
  s.finish();
}

json bath_json(const DebyeBathSpec& b) {
  return json{{"lambda", b.lambda}, {"omega_c", b.omega_c}, {"n_modes", b.n_modes}};
}

}  // namespace

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("malformed JSON: ") + e.what());
  }
  Config cfg;
  Section root(j, "");
  std::string model = to_string(cfg.model);
  root.string("model", model);
  if (model == "spin_boson") {
    cfg.model = ModelKind::spin_boson;
  } else if (model == "cavity") {
    cfg.model = ModelKind::cavity;
  } else {
    root.fail("model", "expected \"spin_boson\" or \"cavity\", got \"" + model + "\"");
  }
  if (root.has("spin_boson")) {
    Section s = root.child("spin_boson");
    SpinBosonConfig& sb = cfg.spin_boson;
    s.number("eps", sb.eps);
    s.number("delta", sb.delta);
    s.number("beta", sb.beta);
    if (s.has("classical_bath")) read_bath(s.child("classical_bath"), sb.classical);
    if (s.has("quantum_bath")) read_bath(s.child("quantum_bath"), sb.quantum);
    s.finish();
  }
  if (root.has("cavity")) {
    Section s = root.child("cavity");
    CavityConfig& c = cfg.cavity;
    s.number("omega0_cm", c.omega0_cm);
    s.number("eps_ev", c.eps_ev);
    s.number("delta_ev", c.delta_ev);
    s.number("zeta_ev_per_angstrom", c.zeta_ev_per_angstrom);
    s.number("mass_amu", c.mass_amu);
    s.number("mu_ab_debye", c.mu_ab_debye);
    s.number("g_cm", c.g_cm);
    s.number("kappa_cm", c.kappa_cm);
    s.number("omega_cav_ev", c.omega_cav_ev);
    s.optional_number("two_c1", c.two_c1);
    s.boolean("photon_coupling", c.photon_coupling);
    s.finish();
  }
  if (root.has("run")) {
    Section s = root.child("run");
    RunSettings& r = cfg.run;
    std::string method = to_string(r.method);
    s.string("method", method);
    try {
      r.method = parse_method(method);
    } catch (const ConfigInvalid& e) {
      s.fail("method", e.what());
    }
    s.optional_number("dt", r.dt);
    s.optional_number("t_max", r.t_max);
    s.integer("n_traj", r.n_traj);
    s.integer("seed", r.seed);
    s.integer("n_output", r.n_output);
    s.integer("bisections", r.bisections);
    s.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(path.string() + ": " + e.what());
  }
}

std::string dump_config(const Config& cfg) {
  const SpinBosonConfig& sb = cfg.spin_boson;
  const CavityConfig& c = cfg.cavity;
  const RunSettings& r = cfg.run;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {
      {"model", to_string(cfg.model)},
      {"spin_boson",
       {{"eps", sb.eps},
        {"delta", sb.delta},
        {"beta", sb.beta},
        {"classical_bath", bath_json(sb.classical)},
        {"quantum_bath", bath_json(sb.quantum)}}},
      {"cavity",
       {{"omega0_cm", c.omega0_cm},
        {"eps_ev", c.eps_ev},
        {"delta_ev", c.delta_ev},
        {"zeta_ev_per_angstrom", c.zeta_ev_per_angstrom},
        {"mass_amu", c.mass_amu},
        {"mu_ab_debye", c.mu_ab_debye},
        {"g_cm", c.g_cm},
        {"kappa_cm", c.kappa_cm},
        {"omega_cav_ev", c.omega_cav_ev},
        {"two_c1", opt(c.two_c1)},
        {"photon_coupling", c.photon_coupling}}},
      {"run",
       {{"method", to_string(r.method)},
        {"dt", opt(r.dt)},
        {"t_max", opt(r.t_max)},
        {"n_traj", r.n_traj},
        {"seed", r.seed},
        {"n_output", r.n_output},
        {"bisections", r.bisections}}},
  };
  return j.dump(2) + "\n";
}

}  // namespace redmash
