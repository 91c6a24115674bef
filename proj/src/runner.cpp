#include "mmc/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmc/ripple_analysis.hpp"
#include "mmc/waveforms.hpp"

namespace mmc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn(i) for i in [0, n) on a small worker pool; results keep input order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, unsigned threads, F&& fn) {
  std::vector<R> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) line_ += ',';
      line_ += cols[i];
    }
    end_row();
  }
  CsvWriter& operator<<(double v) {
    sep();
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    line_.append(buf, res.ptr);
    return *this;
  }
  CsvWriter& operator<<(int v) { return *this << static_cast<double>(v); }
  void end_row() {
    line_ += '\n';
    out_ << line_;
    line_.clear();
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) line_ += ',';
    first_ = false;
  }
  std::ofstream out_;
  std::string line_;
  bool first_ = true;
};

double window_length_for(double f_s, double measure, double periods) {
  return std::max(measure, periods / f_s);
}

RunManifest start_manifest(const RunConfig& cfg, const Scenario& s, const RunOptions& opt) {
  RunManifest m;
  m.scenario_name = s.name;
  m.scenario_path = cfg.source;
  m.output_dir = opt.out_dir.string();
  return m;
}

fs::path output_path(const RunOptions& opt, const Scenario& s, const std::string& suffix) {
  return opt.out_dir / (s.name + suffix);
}

json metrics_json(const SummaryMetrics& m) {
  return {{"cvr_pp", m.cvr_pp},       {"cc_peak", m.cc_peak},         {"arm_i_peak", m.arm_i_peak},
          {"arm_i_rms", m.arm_i_rms}, {"line_i_peak", m.line_i_peak}, {"t0", m.t0},
          {"t1", m.t1}};
}

SummaryMetrics metrics_from(const json& j) {
  SummaryMetrics m;
  m.cvr_pp = j.at("cvr_pp").get<double>();
  m.cc_peak = j.at("cc_peak").get<double>();
  m.arm_i_peak = j.at("arm_i_peak").get<double>();
  m.arm_i_rms = j.at("arm_i_rms").get<double>();
  m.line_i_peak = j.at("line_i_peak").get<double>();
  m.t0 = j.at("t0").get<double>();
  m.t1 = j.at("t1").get<double>();
  return m;
}

json manifest_json(const RunManifest& m) {
  return {{"scenario_name", m.scenario_name}, {"scenario_path", m.scenario_path},
          {"output_dir", m.output_dir},       {"csv_paths", m.csv_paths},
          {"summary_path", m.summary_path},   {"engine_version", m.engine_version},
          {"wall_clock_s", m.wall_clock_s}};
}

RunManifest manifest_from(const json& j) {
  RunManifest m;
  m.scenario_name = j.at("scenario_name").get<std::string>();
  m.scenario_path = j.at("scenario_path").get<std::string>();
  m.output_dir = j.at("output_dir").get<std::string>();
  m.csv_paths = j.at("csv_paths").get<std::vector<std::string>>();
  m.summary_path = j.at("summary_path").get<std::string>();
  m.engine_version = j.at("engine_version").get<std::string>();
  m.wall_clock_s = j.at("wall_clock_s").get<double>();
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

double elapsed(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

Scenario constant_scenario(const Scenario& base, const OperatingPoint& op, double duration, bool injection,
                           std::optional<double> d) {
  Scenario s = base;
  s.segments = {{duration, op, op, injection, d}};
  return s;
}

}  // namespace

Scenario effective_scenario(const RunConfig& cfg, const RunOptions& opt) {
  Scenario s = cfg.scenario;
  if (opt.dt) s.dt = *opt.dt;
  validate_scenario(s);
  return s;
}

TimeWindow metrics_window(const RunConfig& cfg, const Scenario& s, std::optional<double> length) {
  const double total = s.duration();
  if (length) {
    if (!(*length > 0.0)) throw ConfigError("--window: length must be > 0");
    return {std::max(0.0, total - *length), total};
  }
  if (cfg.window) return *cfg.window;
  const double f_end = s.segments.back().end.f_s;
  const double len = f_end > 0.0 ? window_length_for(f_end, 0.5, 6.0) : 0.5;
  return {std::max(0.0, total - len), total};
}

SimulateResult cmd_simulate(const RunConfig& cfg, const RunOptions& opt) {
  const auto start = Clock::now();
  const Scenario s = effective_scenario(cfg, opt);
  const RunRecord rec = run_scenario(s);

  SimulateResult r;
  const TimeWindow w = metrics_window(cfg, s, opt.window_length);
  r.metrics = extract_metrics(rec, w.t0, w.t1);
  for (const auto& [name, nw] : cfg.windows) r.windows.emplace_back(name, extract_metrics(rec, nw.t0, nw.t1));
  r.counters = {rec.reference_saturations, rec.command_saturations, rec.headroom_exhausted_steps,
                rec.switching_events};

  r.manifest = start_manifest(cfg, s, opt);
  fs::create_directories(opt.out_dir);
  if (opt.write_timeseries) {
    const fs::path csv = output_path(opt, s, "_timeseries.csv");
    write_timeseries_csv(rec, csv);
    r.manifest.csv_paths.push_back(csv.string());
  }
  const fs::path summary = output_path(opt, s, "_summary.json");
  r.manifest.summary_path = summary.string();
  r.manifest.wall_clock_s = elapsed(start);
  write_text(summary, summary_json(r));
  return r;
}

FrequencySweepResult cmd_sweep_frequency(const RunConfig& cfg, const RunOptions& opt) {
  const auto start = Clock::now();
  const Scenario base = effective_scenario(cfg, opt);
  const SweepConfig& sw = cfg.sweep;
  if (sw.frequencies.empty()) throw ConfigError("sweep.frequencies: at least one frequency required");

  FrequencySweepResult result;
  result.rows = parallel_map<FrequencyRow>(sw.frequencies.size(), opt.threads, [&](std::size_t i) {
    const double f = sw.frequencies[i];
    const OperatingPoint op = vf_operating_point(base.params, f / base.params.f_rated, sw.load, sw.phi);
    const double len = opt.window_length.value_or(window_length_for(f, sw.measure, sw.measure_periods));
    Scenario s = constant_scenario(base, op, sw.settle + len, false, std::nullopt);
    s.name = base.name + "_f" + std::to_string(i);
    validate_scenario(s);
    const RunRecord rec = run_scenario(s);

    FrequencyRow row;
    row.f_s = f;
    row.dv_analytic = predicted_cvr(base.params, op);
    row.cvr_pp_analytic = half_to_peak_to_peak(row.dv_analytic);
    row.dv_pct = 100.0 * row.dv_analytic / base.params.v_c_init;
    row.cvr_pp_sim = extract_metrics(rec, sw.settle, sw.settle + len).cvr_pp;
    row.cvr_pct_sim = 100.0 * row.cvr_pp_sim / base.params.v_c_init;
    return row;
  });

  result.manifest = start_manifest(cfg, base, opt);
  fs::create_directories(opt.out_dir);
  const fs::path csv = output_path(opt, base, "_sweep_frequency.csv");
  {
    CsvWriter w(csv);
    w.header({"f_s", "dv_analytic", "cvr_pp_analytic", "dv_pct", "cvr_pp_sim", "cvr_pct_sim"});
    for (const auto& r : result.rows) {
      w << r.f_s << r.dv_analytic << r.cvr_pp_analytic << r.dv_pct << r.cvr_pp_sim << r.cvr_pct_sim;
      w.end_row();
    }
  }
  result.manifest.csv_paths.push_back(csv.string());
  const fs::path summary = output_path(opt, base, "_summary.json");
  result.manifest.summary_path = summary.string();
  result.manifest.wall_clock_s = elapsed(start);
  json j = {{"manifest", manifest_json(result.manifest)}, {"rows", json::array()}};
  for (const auto& r : result.rows)
    j["rows"].push_back({{"f_s", r.f_s}, {"dv_analytic", r.dv_analytic}, {"cvr_pp_sim", r.cvr_pp_sim}});
  write_text(summary, j.dump(2));
  return result;
}

double theoretical_injection_peak(const ConverterParams& params, const OperatingPoint& op,
                                  const InjectionConfig& cfg, double d) {
  constexpr int n = 20000;
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * i / n;
    const double v = modulation_signal(op, params.v_dc, th);
    const double is = output_current(op, th);
    const double id = baseline_circulating_current(v, is, params.v_dc);
    peak = std::max(peak, injection_envelope(op, v, is, id, cfg, d, params).i_h);
  }
  return peak;
}

double injection_amplitude(const RunRecord& rec, TimeWindow w) {
  double num = 0.0, den = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec.t[i] < w.t0 || rec.t[i] > w.t1) continue;
    for (const auto& ph : rec.phases) {
      num += ph.i_h_realized[i] * ph.i_h_ref[i];
      den += ph.i_h_ref[i] * ph.i_h_ref[i];
      peak = std::max(peak, std::abs(ph.i_h_ref[i]));
    }
  }
  return den > 0.0 ? num / den * peak : 0.0;
}

std::vector<DStep> d_step_report(const Scenario& s, const RunRecord& rec, double tolerance) {
  // Step boundaries: consecutive injection segments whose slope differs.
  struct Boundary {
    double t, t_end, d;
  };
  std::vector<Boundary> bounds;
  double t = 0.0;
  std::optional<double> prev_d;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const Segment& seg = s.segments[i];
    const double d = seg.d.value_or(s.injection.d);
    if (seg.injection_enabled) {
      if (prev_d && d != *prev_d) bounds.push_back({t, t + seg.duration, d});
      else if (prev_d && !bounds.empty() && bounds.back().t_end == t) bounds.back().t_end = t + seg.duration;
      prev_d = d;
    } else {
      prev_d.reset();
    }
    t += seg.duration;
  }

  // Tracking gain of the injected current (least squares, realized against
  // reference) over a trailing fundamental period; the window keeps PWM
  // ripple out of the estimate.
  const std::size_t n = rec.size();
  std::vector<double> cross(n + 1, 0.0), ref_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0, r = 0.0;
    for (const auto& ph : rec.phases) {
      c += ph.i_h_realized[i] * ph.i_h_ref[i];
      r += ph.i_h_ref[i] * ph.i_h_ref[i];
    }
    cross[i + 1] = cross[i] + c;
    ref_sq[i + 1] = ref_sq[i] + r;
  }
  auto index_at = [&](double time) {
    return static_cast<std::size_t>(std::lower_bound(rec.t.begin(), rec.t.end(), time - 1e-12) - rec.t.begin());
  };

  std::vector<DStep> out;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const Boundary& b = bounds[k];
    const std::size_t lo = index_at(b.t);
    const std::size_t hi = std::min(n, index_at(b.t_end));
    DStep st;
    st.index = static_cast<int>(k);
    st.t_change = b.t;
    st.d = b.d;
    st.settling_time = std::numeric_limits<double>::infinity();
    if (hi <= lo + 1) {
      out.push_back(st);
      continue;
    }
    const double f = std::max(rec.f_s[lo], 1.0);
    const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / (f * rec.sample_dt))));
    auto gain = [&](std::size_t i) {
      const std::size_t a = i + 1 >= win ? i + 1 - win : 0;
      const double den = ref_sq[i + 1] - ref_sq[a];
      return den > 0.0 ? (cross[i + 1] - cross[a]) / den : 0.0;
    };
    const double final_gain = gain(hi - 1);
    std::size_t settled = hi;
    for (std::size_t i = hi; i-- > lo;) {
      if (std::abs(gain(i) - final_gain) > tolerance * std::abs(final_gain)) break;
      settled = i;
    }
    if (settled < hi) st.settling_time = rec.t[settled] - b.t;
    for (std::size_t i = lo; i < hi; ++i)
      for (const auto& ph : rec.phases) st.cc_peak = std::max(st.cc_peak, std::abs(ph.i_h_realized[i]));
    st.cvr_pp = cvr_pp_in_window(rec, b.t, rec.t[hi - 1]);
    out.push_back(st);
  }
  return out;
}

DSweepResult cmd_sweep_d(const RunConfig& cfg, const RunOptions& opt) {
  const auto start = Clock::now();
  const Scenario base = effective_scenario(cfg, opt);
  const SweepConfig& sw = cfg.sweep;
  if (sw.d_values.empty() && !sw.dynamic_steps)
    throw ConfigError("sweep: give a d list and/or dynamic_steps: true");
  if (base.injection.technique == Technique::None) throw ConfigError("injection.technique: a sweep over d needs injection");
  for (std::size_t i = 0; i < sw.d_values.size(); ++i) {
    const double d = sw.d_values[i];
    if (!(d >= base.injection.d_min && d <= 1.0))
      throw ConfigError("sweep.d[" + std::to_string(i) + "] = " + std::to_string(d) + " outside [d_min, 1]");
  }

  DSweepResult result;
  result.manifest = start_manifest(cfg, base, opt);
  fs::create_directories(opt.out_dir);

  const OperatingPoint op = vf_operating_point(base.params, sw.speed, sw.load, sw.phi);
  const double len = opt.window_length.value_or(window_length_for(op.f_s, sw.measure, sw.measure_periods));
  result.rows = parallel_map<DRow>(sw.d_values.size(), opt.threads, [&](std::size_t i) {
    const double d = sw.d_values[i];
    Scenario s = constant_scenario(base, op, sw.settle + len, true, d);
    validate_scenario(s);
    const RunRecord rec = run_scenario(s);
    const TimeWindow w{sw.settle, sw.settle + len};
    const SummaryMetrics m = extract_metrics(rec, w.t0, w.t1);
    DRow row;
    row.d = d;
    row.k = scaling_factor_k(base.injection.technique, d);
    row.i_h_theory = theoretical_injection_peak(base.params, op, base.injection, d);
    row.i_h_sim = injection_amplitude(rec, w);
    row.cc_peak = m.cc_peak;
    row.cvr_pp = m.cvr_pp;
    row.arm_i_peak = m.arm_i_peak;
    return row;
  });
  if (!result.rows.empty()) {
    const fs::path csv = output_path(opt, base, "_sweep_d.csv");
    CsvWriter w(csv);
    w.header({"d", "k", "i_h_theory", "i_h_sim", "cc_peak", "cvr_pp", "arm_i_peak"});
    for (const auto& r : result.rows) {
      w << r.d << r.k << r.i_h_theory << r.i_h_sim << r.cc_peak << r.cvr_pp << r.arm_i_peak;
      w.end_row();
    }
    result.manifest.csv_paths.push_back(csv.string());
  }

  if (sw.dynamic_steps) {
    const RunRecord rec = run_scenario(base);
    result.steps = d_step_report(base, rec, sw.settle_tolerance);
    const fs::path csv = output_path(opt, base, "_d_steps.csv");
    {
      CsvWriter w(csv);
      w.header({"step", "t_change", "d", "settling_time", "cc_peak", "cvr_pp"});
      for (const auto& st : result.steps) {
        w << st.index << st.t_change << st.d << st.settling_time << st.cc_peak << st.cvr_pp;
        w.end_row();
      }
    }
    result.manifest.csv_paths.push_back(csv.string());
    if (opt.write_timeseries) {
      const fs::path ts = output_path(opt, base, "_timeseries.csv");
      write_timeseries_csv(rec, ts);
      result.manifest.csv_paths.push_back(ts.string());
    }
  }

  const fs::path summary = output_path(opt, base, "_summary.json");
  result.manifest.summary_path = summary.string();
  result.manifest.wall_clock_s = elapsed(start);
  json j = {{"manifest", manifest_json(result.manifest)}, {"rows", json::array()}, {"steps", json::array()}};
  for (const auto& r : result.rows)
    j["rows"].push_back({{"d", r.d}, {"k", r.k}, {"i_h_theory", r.i_h_theory}, {"i_h_sim", r.i_h_sim}});
  for (const auto& st : result.steps) {
    json e = {{"t_change", st.t_change}, {"d", st.d}, {"cvr_pp", st.cvr_pp}};
    e["settling_time"] = std::isfinite(st.settling_time) ? json(st.settling_time) : json(nullptr);
    j["steps"].push_back(e);
  }
  write_text(summary, j.dump(2));
  return result;
}

Prediction cmd_predict(const RunConfig& cfg, const RunOptions& opt) {
  const auto start = Clock::now();
  const Scenario s = effective_scenario(cfg, opt);
  Prediction p;
  p.op = s.segments.back().end;
  p.dv = predicted_cvr(s.params, p.op);
  p.cvr_pp = half_to_peak_to_peak(p.dv);
  const double d = s.segments.back().d.value_or(s.injection.d);
  const InjectionEnvelope env = injection_envelope(p.op, 0.0, 0.0, 0.0, s.injection, d, s.params);
  p.v_h = env.v_h;
  p.k = scaling_factor_k(s.injection.technique, d);
  p.k_c = kc_taper(p.op.m_a, s.injection.kc_lo, s.injection.kc_hi);
  p.i_h_peak = theoretical_injection_peak(s.params, p.op, s.injection, d);
  std::vector<double> ds;
  for (int i = 0; i <= 24; ++i) ds.push_back(s.injection.d_min + (1.0 - s.injection.d_min) * i / 24.0);
  for (const auto& r : k_d_sweep(ds, s.injection.d_min)) p.kd_table.push_back({r.d, r.k, r.reduction});

  p.manifest = start_manifest(cfg, s, opt);
  fs::create_directories(opt.out_dir);
  const fs::path csv = output_path(opt, s, "_kd_table.csv");
  {
    CsvWriter w(csv);
    w.header({"d", "k", "reduction"});
    for (const auto& r : p.kd_table) {
      w << r.d << r.k << r.reduction;
      w.end_row();
    }
  }
  p.manifest.csv_paths.push_back(csv.string());
  const fs::path summary = output_path(opt, s, "_predict.json");
  p.manifest.summary_path = summary.string();
  p.manifest.wall_clock_s = elapsed(start);
  json j = {{"f_s", p.op.f_s},         {"m_a", p.op.m_a},   {"i_peak", p.op.i_peak}, {"phi", p.op.phi},
            {"dv", p.dv},              {"cvr_pp", p.cvr_pp}, {"v_h", p.v_h},         {"i_h_peak", p.i_h_peak},
            {"k", p.k},                {"k_c", p.k_c},      {"technique", std::string(to_string(s.injection.technique))},
            {"manifest", manifest_json(p.manifest)}};
  write_text(summary, j.dump(2));
  return p;
}

void write_timeseries_csv(const RunRecord& rec, const fs::path& path) {
  static const char* phase_names[] = {"a", "b", "c"};
  std::vector<std::string> cols{"t"};
  for (const char* x : phase_names) {
    const std::string p = x;
    for (const char* c : {"i_s", "i_circ", "i_u", "i_l", "i_h_ref", "i_h_realized", "v_h_ref"})
      cols.push_back(std::string(c) + "_" + p);
    for (const char* arm : {"u", "l"})
      for (const char* c : {"vc_min", "vc_mean", "vc_max"}) cols.push_back(std::string(c) + "_" + p + arm);
    cols.push_back("n_insert_u_" + p);
    cols.push_back("n_insert_l_" + p);
  }
  CsvWriter w(path);
  w.header(cols);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    w << rec.t[i];
    for (const auto& ph : rec.phases) {
      w << ph.i_s[i] << ph.i_circ[i] << ph.i_u[i] << ph.i_l[i] << ph.i_h_ref[i] << ph.i_h_realized[i] << ph.v_h_ref[i];
      for (const auto* a : {&ph.upper, &ph.lower}) w << a->vc_min[i] << a->vc_mean[i] << a->vc_max[i];
      w << ph.upper.n_insert[i] << ph.lower.n_insert[i];
    }
    w.end_row();
  }
}

std::string summary_json(const SimulateResult& r) {
  json j;
  j["metrics"] = metrics_json(r.metrics);
  j["windows"] = json::object();
  for (const auto& [name, m] : r.windows) j["windows"][name] = metrics_json(m);
  j["counters"] = {{"reference_saturations", r.counters.reference_saturations},
                   {"command_saturations", r.counters.command_saturations},
                   {"headroom_exhausted_steps", r.counters.headroom_exhausted_steps},
                   {"switching_events", r.counters.switching_events}};
  j["manifest"] = manifest_json(r.manifest);
  return j.dump(2);
}

SimulateResult parse_summary_json(const std::string& text) {
  const json j = json::parse(text);
  SimulateResult r;
  r.metrics = metrics_from(j.at("metrics"));
  for (const auto& [name, m] : j.at("windows").items()) r.windows.emplace_back(name, metrics_from(m));
  const json& c = j.at("counters");
  r.counters = {c.at("reference_saturations").get<std::uint64_t>(), c.at("command_saturations").get<std::uint64_t>(),
                c.at("headroom_exhausted_steps").get<std::uint64_t>(), c.at("switching_events").get<std::uint64_t>()};
  r.manifest = manifest_from(j.at("manifest"));
  return r;
}

namespace {

std::string metrics_row(const std::string& label, const SummaryMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s [%7.3f, %7.3f] s  %9.2f %9.2f %9.2f %9.2f %9.2f\n", label.c_str(), m.t0, m.t1,
                m.cvr_pp, m.cc_peak, m.arm_i_peak, m.arm_i_rms, m.line_i_peak);
  return buf;
}

}  // namespace

std::string format_summary(const SimulateResult& r) {
  std::string s = "scenario " + r.manifest.scenario_name + "\n";
  s += "window       span                  cvr_pp[V]  cc_pk[A] arm_pk[A] arm_rms[A] line_pk[A]\n";
  s += metrics_row("main", r.metrics);
  for (const auto& [name, m] : r.windows) s += metrics_row(name, m);
  char buf[160];
  std::snprintf(buf, sizeof buf, "saturations: reference %llu, command %llu; headroom-exhausted steps %llu\n",
                static_cast<unsigned long long>(r.counters.reference_saturations),
                static_cast<unsigned long long>(r.counters.command_saturations),
                static_cast<unsigned long long>(r.counters.headroom_exhausted_steps));
  return s + buf;
}

std::string format_frequency_sweep(const FrequencySweepResult& r) {
  std::string s = "  f_s[Hz]  dv_model[V]  cvr_pp_sim[V]  cvr_sim[%Vc]\n";
  char buf[128];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%9.2f %12.4f %14.2f %13.2f\n", row.f_s, row.dv_analytic, row.cvr_pp_sim,
                  row.cvr_pct_sim);
    s += buf;
  }
  return s;
}

std::string format_d_sweep(const DSweepResult& r) {
  std::string s;
  char buf[160];
  if (!r.rows.empty()) {
    s += "      d        k  I_h_theory[A]  I_h_sim[A]  cc_peak[A]  cvr_pp[V]\n";
    for (const auto& row : r.rows) {
      std::snprintf(buf, sizeof buf, "%7.3f %8.4f %14.2f %11.2f %11.2f %10.2f\n", row.d, row.k, row.i_h_theory,
                    row.i_h_sim, row.cc_peak, row.cvr_pp);
      s += buf;
    }
  }
  if (!r.steps.empty()) {
    s += "step  t_change[s]      d  settling[s]  cc_peak[A]  cvr_pp[V]\n";
    for (const auto& st : r.steps) {
      std::snprintf(buf, sizeof buf, "%4d %12.3f %6.3f %12.3f %11.2f %10.2f\n", st.index, st.t_change, st.d,
                    st.settling_time, st.cc_peak, st.cvr_pp);
      s += buf;
    }
  }
  return s;
}

std::string format_prediction(const Prediction& p) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "operating point: f_s %.3f Hz, m_a %.4f, I %.2f A, phi %.4f rad\n"
                "ripple model: dv %.4f V (cvr_pp %.4f V)\n"
                "injection: V_h %.2f V, I_h peak %.2f A, k %.4f, k_c %.4f\n",
                p.op.f_s, p.op.m_a, p.op.i_peak, p.op.phi, p.dv, p.cvr_pp, p.v_h, p.i_h_peak, p.k, p.k_c);
  std::string s = buf;
  s += "      d        k  reduction\n";
  for (const auto& r : p.kd_table) {
    std::snprintf(buf, sizeof buf, "%7.3f %8.4f %10.4f\n", r.d, r.k, r.reduction);
    s += buf;
  }
  return s;
}

}  // namespace mmc
