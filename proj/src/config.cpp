#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "mmc/runner.hpp"

namespace mmc {

namespace {

constexpr double kDeg = kPi / 180.0;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(path.empty() ? "<root>" : path, "expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) fail(join(path, key), "unknown key");
  }
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number, got '" + n.Scalar() + "'");
  }
}

int as_int(const YAML::Node& n, const std::string& path) {
  const double v = as_double(n, path);
  if (v != std::floor(v)) fail(path, "expected an integer");
  return static_cast<int>(v);
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, "expected true/false");
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail(path, "expected true/false, got '" + n.Scalar() + "'");
  }
}

std::vector<double> as_list(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TimeWindow as_window(const YAML::Node& n, const std::string& path) {
  const auto v = as_list(n, path);
  if (v.size() != 2) fail(path, "expected [t0, t1]");
  if (!(v[1] > v[0])) fail(path, "expected t1 > t0");
  return {v[0], v[1]};
}

void read(const YAML::Node& parent, const char* key, const std::string& path, double& out) {
  if (const auto n = parent[key]) out = as_double(n, join(path, key));
}
void read(const YAML::Node& parent, const char* key, const std::string& path, int& out) {
  if (const auto n = parent[key]) out = as_int(n, join(path, key));
}
void read(const YAML::Node& parent, const char* key, const std::string& path, bool& out) {
  if (const auto n = parent[key]) out = as_bool(n, join(path, key));
}

double read_phi(const YAML::Node& n, const std::string& path, double fallback) {
  if (n["phi"] && n["phi_deg"]) fail(path, "give either phi or phi_deg, not both");
  if (const auto p = n["phi"]) return as_double(p, path + ".phi");
  if (const auto p = n["phi_deg"]) return as_double(p, path + ".phi_deg") * kDeg;
  return fallback;
}

// Either explicit {f_s, m_a, i_peak} or the V/f shorthand {speed, load}.
OperatingPoint read_point(const YAML::Node& n, const std::string& path, const ConverterParams& params) {
  check_keys(n, path, {"f_s", "m_a", "i_peak", "speed", "load", "phi", "phi_deg"});
  const bool explicit_form = n["f_s"] || n["m_a"] || n["i_peak"];
  const bool shorthand = n["speed"] || n["load"];
  if (explicit_form && shorthand) fail(path, "mixes f_s/m_a/i_peak with speed/load");
  const double phi = read_phi(n, path, kDefaultPhi);
  if (shorthand) {
    if (!n["speed"] || !n["load"]) fail(path, "speed and load are both required");
    return vf_operating_point(params, as_double(n["speed"], path + ".speed"), as_double(n["load"], path + ".load"), phi);
  }
  if (!n["f_s"] || !n["m_a"] || !n["i_peak"]) fail(path, "f_s, m_a and i_peak are all required");
  return {as_double(n["f_s"], path + ".f_s"), as_double(n["m_a"], path + ".m_a"),
          as_double(n["i_peak"], path + ".i_peak"), phi};
}

ConverterParams read_params(const YAML::Node& n) {
  ConverterParams p;
  if (!n) return p;
  const std::string path = "params";
  check_keys(n, path,
             {"v_dc", "n_sm", "c_sm", "l_arm", "r_arm", "f_carrier", "v_c_init", "f_rated", "v_line_rated",
              "i_peak_full_load"});
  read(n, "v_dc", path, p.v_dc);
  read(n, "n_sm", path, p.n_sm);
  read(n, "c_sm", path, p.c_sm);
  read(n, "l_arm", path, p.l_arm);
  read(n, "r_arm", path, p.r_arm);
  read(n, "f_carrier", path, p.f_carrier);
  read(n, "v_c_init", path, p.v_c_init);
  read(n, "f_rated", path, p.f_rated);
  read(n, "v_line_rated", path, p.v_line_rated);
  read(n, "i_peak_full_load", path, p.i_peak_full_load);
  return p;
}

InjectionConfig read_injection(const YAML::Node& n) {
  InjectionConfig c;
  if (!n) return c;
  const std::string path = "injection";
  check_keys(n, path, {"technique", "d", "d_min", "f_h", "kc_lo", "kc_hi", "headroom_floor"});
  if (const auto t = n["technique"]) {
    try {
      c.technique = technique_from_string(t.as<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(path + ".technique", e.what());
    }
  }
  read(n, "d", path, c.d);
  read(n, "d_min", path, c.d_min);
  read(n, "f_h", path, c.f_h);
  read(n, "kc_lo", path, c.kc_lo);
  read(n, "kc_hi", path, c.kc_hi);
  read(n, "headroom_floor", path, c.headroom_floor);
  return c;
}

ControlConfig read_control(const YAML::Node& n) {
  ControlConfig c;
  if (!n) return c;
  const std::string path = "control";
  check_keys(n, path,
             {"cc_bandwidth_hz", "cc_limit_fraction", "cc_feedforward", "cc_enabled", "energy_gain", "balance_gain",
              "balance_gain_hf", "loss_feedforward"});
  read(n, "cc_bandwidth_hz", path, c.cc_bandwidth_hz);
  read(n, "cc_limit_fraction", path, c.cc_limit_fraction);
  read(n, "cc_feedforward", path, c.cc_feedforward);
  read(n, "cc_enabled", path, c.cc_enabled);
  read(n, "energy_gain", path, c.energy_gain);
  read(n, "balance_gain", path, c.balance_gain);
  read(n, "balance_gain_hf", path, c.balance_gain_hf);
  read(n, "loss_feedforward", path, c.loss_feedforward);
  return c;
}

std::vector<Segment> read_segments(const YAML::Node& n, const ConverterParams& params) {
  std::vector<Segment> out;
  if (!n) return out;
  if (!n.IsSequence()) fail("segments", "expected a list");
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string path = "segments[" + std::to_string(i) + "]";
    const YAML::Node s = n[i];
    check_keys(s, path, {"duration", "point", "start", "end", "injection", "d"});
    Segment seg;
    if (!s["duration"]) fail(path + ".duration", "required");
    seg.duration = as_double(s["duration"], path + ".duration");
    if (s["point"]) {
      if (s["start"] || s["end"]) fail(path, "give either point or start/end");
      seg.start = seg.end = read_point(s["point"], path + ".point", params);
    } else {
      if (!s["start"]) fail(path, "point or start is required");
      seg.start = read_point(s["start"], path + ".start", params);
      seg.end = s["end"] ? read_point(s["end"], path + ".end", params) : seg.start;
    }
    read(s, "injection", path, seg.injection_enabled);
    if (s["d"]) seg.d = as_double(s["d"], path + ".d");
    out.push_back(seg);
  }
  return out;
}

SweepConfig read_sweep(const YAML::Node& n) {
  SweepConfig c;
  if (!n) return c;
  const std::string path = "sweep";
  check_keys(n, path,
             {"frequencies", "d", "dynamic_steps", "speed", "load", "phi", "phi_deg", "settle", "measure",
              "measure_periods", "settle_tolerance"});
  if (n["frequencies"]) c.frequencies = as_list(n["frequencies"], path + ".frequencies");
  if (n["d"]) c.d_values = as_list(n["d"], path + ".d");
  read(n, "dynamic_steps", path, c.dynamic_steps);
  read(n, "speed", path, c.speed);
  read(n, "load", path, c.load);
  c.phi = read_phi(n, path, c.phi);
  read(n, "settle", path, c.settle);
  read(n, "measure", path, c.measure);
  read(n, "measure_periods", path, c.measure_periods);
  read(n, "settle_tolerance", path, c.settle_tolerance);
  for (std::size_t i = 0; i < c.frequencies.size(); ++i)
    if (!(c.frequencies[i] > 0.0)) fail(path + ".frequencies[" + std::to_string(i) + "]", "must be > 0");
  if (!(c.settle >= 0.0)) fail(path + ".settle", "must be >= 0");
  if (!(c.measure > 0.0)) fail(path + ".measure", "must be > 0");
  if (!(c.settle_tolerance > 0.0)) fail(path + ".settle_tolerance", "must be > 0");
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError(source + ": empty configuration");
  check_keys(root, "", {"name", "params", "injection", "control", "simulation", "segments", "metrics", "sweep"});

  RunConfig cfg;
  cfg.source = source;
  Scenario& s = cfg.scenario;
  s.name = root["name"] ? root["name"].as<std::string>() : std::filesystem::path(source).stem().string();
  s.params = read_params(root["params"]);
  s.injection = read_injection(root["injection"]);
  s.control = read_control(root["control"]);
  if (const auto sim = root["simulation"]) {
    check_keys(sim, "simulation", {"dt", "record_decimation"});
    read(sim, "dt", "simulation", s.dt);
    read(sim, "record_decimation", "simulation", s.record_decimation);
  }
  s.segments = read_segments(root["segments"], s.params);
  if (const auto m = root["metrics"]) {
    check_keys(m, "metrics", {"window", "windows"});
    if (m["window"]) cfg.window = as_window(m["window"], "metrics.window");
    if (const auto ws = m["windows"]) {
      if (!ws.IsMap()) fail("metrics.windows", "expected a mapping of name: [t0, t1]");
      for (const auto& kv : ws) {
        const auto name = kv.first.as<std::string>();
        cfg.windows.emplace_back(name, as_window(kv.second, "metrics.windows." + name));
      }
    }
  }
  cfg.sweep = read_sweep(root["sweep"]);

  // Sweeps build their own segments, so a sweep-only file may omit them.
  const bool sweep_only = s.segments.empty() && (!cfg.sweep.frequencies.empty() || !cfg.sweep.d_values.empty());
  if (sweep_only) {
    const auto op = vf_operating_point(s.params, cfg.sweep.speed, cfg.sweep.load, cfg.sweep.phi);
    s.segments.push_back({1.0, op, op, s.injection.technique != Technique::None, {}});
  }
  validate_scenario(s);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace mmc
