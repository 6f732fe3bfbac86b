#include "vortexlab/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace vortexlab::harness {

using nlohmann::json;

namespace {

// Error tagged with a JSON pointer so the text parser can attach a line.
class PathError : public ConfigError {
 public:
  PathError(std::string path, const std::string& msg)
      : ConfigError(path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw PathError(path.empty() ? "/" : path, msg);
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (const char* a : keys) known = known || k == a;
      if (!known) fail(path_ + "/" + k, "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string at(const char* key) const { return path_ + "/" + key; }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    return number_at(j_.at(key), at(key));
  }
  double number(const char* key) const {
    if (!has(key)) fail(at(key), "missing required number");
    return number_at(j_.at(key), at(key));
  }
  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<int>();
  }
  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(at(key), "expected an array of numbers");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number_at(v[i], at(key) + "/" + std::to_string(i)));
    return out;
  }

  static double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

 private:
  const json& j_;
  std::string path_;
};

PlaneVector read_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
  return {Reader::number_at(v[0], path + "/0"), Reader::number_at(v[1], path + "/1")};
}

VortexEntry read_vortex(const Reader& r, const std::string& path) {
  VortexEntry e;
  if (!r.has("center")) fail(path + "/center", "missing vortex center");
  e.center = read_point(r.raw("center"), path + "/center");
  e.gamma = r.number("gamma", 1.0);
  e.profile = r.string("profile", "cauchy");
  e.sigma = r.number("sigma", 2.0);
  return e;
}

json vortex_json(const VortexEntry& e) {
  return {{"center", {e.center.x, e.center.y}},
          {"gamma", e.gamma},
          {"profile", e.profile},
          {"sigma", e.sigma}};
}

const char* velocity_name(sim::VelocityMethod m) {
  switch (m) {
    case sim::VelocityMethod::Direct: return "direct";
    case sim::VelocityMethod::Tree: return "tree";
    default: return "auto";
  }
}

// Maps every JSON pointer in a syntactically valid document to the line its
// value starts on.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : s_(text) {
    skip_ws();
    value("");
  }
  int line_of(std::string path) const {
    while (true) {
      auto it = lines_.find(path);
      if (it != lines_.end()) return it->second;
      auto slash = path.rfind('/');
      if (slash == std::string::npos || path.empty()) return 0;
      path.resize(slash);
    }
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }
  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }
  void value(const std::string& path) {
    lines_.emplace(path, line_);
    if (i_ >= s_.size()) return;
    char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        std::string key = string_token();
        skip_ws();
        ++i_;  // colon
        skip_ws();
        value(path + "/" + key);
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip_ws();
      for (int k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(path + "/" + std::to_string(k));
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && !std::strchr(",]} \t\r\n", s_[i_])) ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

}  // namespace

void ScenarioConfig::validate() const {
  if (name.empty()) fail("/name", "scenario name must be non-empty");
  if (vortices.empty()) fail("/vortices", "at least one vortex is required");
  for (std::size_t i = 0; i < vortices.size(); ++i) {
    const auto& v = vortices[i];
    const std::string at = "/vortices/" + std::to_string(i);
    if (!v.center.finite()) fail(at + "/center", "must be finite");
    if (!(v.gamma != 0.0) || !std::isfinite(v.gamma)) fail(at + "/gamma", "must be finite and non-zero");
    try {
      profiles::RadialProfile::from_name(v.profile, v.sigma);
    } catch (const std::exception& e) {
      fail(at + "/profile", e.what());
    }
    for (std::size_t k = 0; k < i; ++k)
      if (vortices[k].center == v.center)
        fail(at + "/center", "coincident vortex centers: vortices " + std::to_string(k) +
                                 " and " + std::to_string(i) + " share a center");
  }
  if (epsilons.empty()) fail("/epsilon", "at least one epsilon is required");
  for (std::size_t i = 0; i < epsilons.size(); ++i)
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0))
      fail("/epsilon_sweep/" + std::to_string(i), "epsilon must lie in (0, 1)");
  if (split_beta && !(*split_beta > 0.0 && *split_beta < 1.0))
    fail("/perturbation/split_beta", "must lie in (0, 1)");
  for (std::size_t i = 0; i < perturbation_blobs.size(); ++i) {
    const auto& b = perturbation_blobs[i];
    const std::string at = "/perturbation/blobs/" + std::to_string(i);
    if (!(b.epsilon > 0.0) || !std::isfinite(b.epsilon)) fail(at + "/epsilon", "must be positive");
    if (!std::isfinite(b.shape.gamma)) fail(at + "/gamma", "must be finite");
    try {
      profiles::RadialProfile::from_name(b.shape.profile, b.shape.sigma);
    } catch (const std::exception& e) {
      fail(at + "/profile", e.what());
    }
  }
  if (!(h_over_eps > 0.0)) fail("/grid/h_over_eps", "must be positive");
  if (!(mass_capture > 0.0 && mass_capture < 1.0)) fail("/grid/mass_capture", "must lie in (0, 1)");
  if (max_particles == 0) fail("/grid/max_particles", "must be positive");
  if (dt && !(*dt > 0.0)) fail("/sim/dt", "must be positive");
  if (!(t_end > 0.0) && t_end_mode == TEndMode::Fixed) fail("/sim/t_end", "must be positive");
  if (record_every < 1) fail("/sim/record_every", "must be >= 1");
  if (snapshot_every < 0) fail("/sim/snapshot_every", "must be >= 0");
  try {
    tree.validate();
  } catch (const std::exception& e) {
    fail("/sim/tree", e.what());
  }
  try {
    diagnostics.validate();
  } catch (const std::exception& e) {
    fail("/diagnostics", e.what());
  }
}

double ScenarioConfig::min_separation() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vortices.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      d = std::min(d, distance(vortices[i].center, vortices[k].center));
  return d;
}

profiles::InitialData ScenarioConfig::initial_data(double epsilon) const {
  profiles::InitialData data;
  for (const auto& v : vortices)
    data.vortices.push_back(
        {v.center, v.gamma, profiles::RadialProfile::from_name(v.profile, v.sigma), epsilon});
  data.perturbation.split_beta = split_beta;
  for (const auto& b : perturbation_blobs)
    data.perturbation.blobs.push_back(
        {b.shape.center, b.shape.gamma,
         profiles::RadialProfile::from_name(b.shape.profile, b.shape.sigma), b.epsilon});
  return data;
}

pointvortex::VortexConfiguration ScenarioConfig::point_vortices() const {
  pointvortex::VortexConfiguration c;
  for (const auto& v : vortices) {
    c.positions.push_back(v.center);
    c.gammas.push_back(v.gamma);
  }
  return c;
}

ScenarioConfig scenario_from_json(const json& j) {
  Reader top(j, "");
  top.allow({"name", "vortices", "epsilon", "epsilon_sweep", "perturbation", "grid", "sim",
             "diagnostics"});
  ScenarioConfig c;
  c.name = top.string("name", "");

  if (!top.has("vortices") || !top.raw("vortices").is_array())
    fail("/vortices", "expected an array of vortices");
  const json& vs = top.raw("vortices");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string at = "/vortices/" + std::to_string(i);
    Reader r(vs[i], at);
    r.allow({"center", "gamma", "profile", "sigma"});
    c.vortices.push_back(read_vortex(r, at));
  }

  if (top.has("epsilon") && top.has("epsilon_sweep"))
    fail("/epsilon", "give either epsilon or epsilon_sweep, not both");
  if (top.has("epsilon")) c.epsilons = {top.number("epsilon")};
  if (top.has("epsilon_sweep")) c.epsilons = top.numbers("epsilon_sweep");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    if (!(c.epsilons[i] > 0.0 && c.epsilons[i] < 1.0))
      fail(top.has("epsilon") ? "/epsilon" : "/epsilon_sweep/" + std::to_string(i),
           "epsilon must lie in (0, 1)");

  if (top.has("perturbation")) {
    Reader p(top.raw("perturbation"), "/perturbation");
    p.allow({"split_beta", "blobs"});
    if (p.has("split_beta")) c.split_beta = p.number("split_beta");
    if (p.has("blobs")) {
      const json& bs = p.raw("blobs");
      if (!bs.is_array()) fail("/perturbation/blobs", "expected an array");
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const std::string at = "/perturbation/blobs/" + std::to_string(i);
        Reader r(bs[i], at);
        r.allow({"center", "gamma", "profile", "sigma", "epsilon"});
        c.perturbation_blobs.push_back({read_vortex(r, at), r.number("epsilon")});
      }
    }
  }

  if (top.has("grid")) {
    Reader g(top.raw("grid"), "/grid");
    g.allow({"h_over_eps", "mass_capture", "max_particles"});
    c.h_over_eps = g.number("h_over_eps", c.h_over_eps);
    c.mass_capture = g.number("mass_capture", c.mass_capture);
    double mp = g.number("max_particles", static_cast<double>(c.max_particles));
    if (!(mp >= 1.0) || mp != std::floor(mp)) fail("/grid/max_particles", "must be a positive integer");
    c.max_particles = static_cast<std::size_t>(mp);
  }

  if (top.has("sim")) {
    Reader s(top.raw("sim"), "/sim");
    s.allow({"dt", "t_end", "t_end_mode", "velocity", "tree", "record_every", "snapshot_every"});
    if (s.has("dt")) c.dt = s.number("dt");
    c.t_end = s.number("t_end", c.t_end);
    std::string mode = s.string("t_end_mode", "fixed");
    if (mode == "fixed") c.t_end_mode = TEndMode::Fixed;
    else if (mode == "c0_log_A") c.t_end_mode = TEndMode::C0LogA;
    else fail(s.at("t_end_mode"), "expected \"fixed\" or \"c0_log_A\"");
    std::string vel = s.string("velocity", "auto");
    if (vel == "auto") c.velocity = sim::VelocityMethod::Auto;
    else if (vel == "direct") c.velocity = sim::VelocityMethod::Direct;
    else if (vel == "tree") c.velocity = sim::VelocityMethod::Tree;
    else fail(s.at("velocity"), "expected \"auto\", \"direct\" or \"tree\"");
    if (s.has("tree")) {
      Reader t(s.raw("tree"), "/sim/tree");
      t.allow({"opening_angle", "max_leaf_size", "expansion_order"});
      c.tree.opening_angle = t.number("opening_angle", c.tree.opening_angle);
      c.tree.max_leaf_size = t.integer("max_leaf_size", c.tree.max_leaf_size);
      c.tree.expansion_order = t.integer("expansion_order", c.tree.expansion_order);
    }
    c.record_every = s.integer("record_every", c.record_every);
    c.snapshot_every = s.integer("snapshot_every", c.snapshot_every);
  }

  if (top.has("diagnostics")) {
    Reader d(top.raw("diagnostics"), "/diagnostics");
    d.allow({"fractions", "R", "r", "outer_powers", "a", "q", "c0"});
    auto& ds = c.diagnostics;
    if (d.has("fractions")) ds.fractions = d.numbers("fractions");
    ds.cutoff_radii = d.numbers("R");
    ds.ring_radii = d.numbers("r");
    ds.outer_powers = d.numbers("outer_powers");
    ds.a = d.number("a", ds.a);
    ds.q = d.number("q", ds.q);
    ds.c0 = d.number("c0", ds.c0);
  }

  c.validate();
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["vortices"] = json::array();
  for (const auto& v : c.vortices) j["vortices"].push_back(vortex_json(v));
  j["epsilon_sweep"] = c.epsilons;
  if (c.split_beta || !c.perturbation_blobs.empty()) {
    json p = json::object();
    if (c.split_beta) p["split_beta"] = *c.split_beta;
    p["blobs"] = json::array();
    for (const auto& b : c.perturbation_blobs) {
      json e = vortex_json(b.shape);
      e["epsilon"] = b.epsilon;
      p["blobs"].push_back(e);
    }
    j["perturbation"] = p;
  }
  j["grid"] = {{"h_over_eps", c.h_over_eps},
               {"mass_capture", c.mass_capture},
               {"max_particles", c.max_particles}};
  json s = {{"t_end", c.t_end},
            {"t_end_mode", c.t_end_mode == TEndMode::Fixed ? "fixed" : "c0_log_A"},
            {"velocity", velocity_name(c.velocity)},
            {"tree",
             {{"opening_angle", c.tree.opening_angle},
              {"max_leaf_size", c.tree.max_leaf_size},
              {"expansion_order", c.tree.expansion_order}}},
            {"record_every", c.record_every},
            {"snapshot_every", c.snapshot_every}};
  if (c.dt) s["dt"] = *c.dt;
  j["sim"] = s;
  const auto& d = c.diagnostics;
  j["diagnostics"] = {{"fractions", d.fractions}, {"R", d.cutoff_radii}, {"r", d.ring_radii},
                      {"outer_powers", d.outer_powers}, {"a", d.a}, {"q", d.q}, {"c0", d.c0}};
  return j;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const PathError& e) {
    LineIndex index(text);
    throw ConfigError("line " + std::to_string(index.line_of(e.path())) + ": " + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

ScenarioConfig corotate_base() {
  ScenarioConfig c;
  c.name = "corotate";
  c.vortices = {{{-0.5, 0.0}, 1.0, "gaussian", 2.0}, {{0.5, 0.0}, 1.0, "gaussian", 2.0}};
  c.epsilons = {0.1, 0.05, 0.025};
  c.h_over_eps = 1.0 / 6.0;
  c.mass_capture = 0.999;
  c.t_end = 1.0;
  c.record_every = 10;
  c.snapshot_every = 25;
  c.diagnostics.fractions = {0.99, 0.5};
  c.diagnostics.outer_powers = {0.45};
  return c;
}

}  // namespace

std::vector<ScenarioConfig> builtin_scenarios() {
  std::vector<ScenarioConfig> out;

  ScenarioConfig pair = corotate_base();
  pair.name = "pair-translate";
  pair.vortices[1].gamma = -1.0;
  pair.epsilons = {0.05};
  out.push_back(pair);

  out.push_back(corotate_base());

  ScenarioConfig single;
  single.name = "single-cauchy";
  single.vortices = {{{0.0, 0.0}, 1.0, "cauchy", 2.0}};
  single.epsilons = {0.05};
  single.h_over_eps = 0.25;
  single.mass_capture = 0.995;
  single.dt = 0.01;
  single.t_end = 1.0;
  single.velocity = sim::VelocityMethod::Direct;
  single.record_every = 5;
  single.snapshot_every = 5;
  single.diagnostics.fractions = {0.99, 0.5};
  out.push_back(single);

  ScenarioConfig sweep;
  sweep.name = "sweep-concentration";
  sweep.vortices = {{{0.0, 0.0}, 1.0, "cauchy", 2.0}};
  sweep.epsilons = {0.1, 0.05, 0.025};
  sweep.h_over_eps = 1.0;
  sweep.mass_capture = 0.9995;
  sweep.dt = 0.01;
  sweep.t_end = 1.0;
  sweep.velocity = sim::VelocityMethod::Direct;
  sweep.record_every = 10;
  sweep.snapshot_every = 5;
  sweep.diagnostics.fractions = {0.99};
  sweep.diagnostics.outer_powers = {0.2};
  out.push_back(sweep);

  ScenarioConfig lt = corotate_base();
  lt.name = "long-time";
  lt.epsilons = {0.05};
  lt.t_end_mode = TEndMode::C0LogA;
  lt.diagnostics.c0 = 0.1;
  out.push_back(lt);

  for (const auto& c : out) c.validate();
  return out;
}

ScenarioConfig builtin_scenario(const std::string& name) {
  for (auto& c : builtin_scenarios())
    if (c.name == name) return c;
  throw ConfigError("unknown builtin scenario \"" + name + "\"");
}

std::string config_hash(const ScenarioConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : scenario_to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vortexlab::harness
