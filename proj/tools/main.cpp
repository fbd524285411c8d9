// wffd: command-line front end for the WFFD rate/geometry/simulation library.
// Parses JSON experiment configs, dispatches through the C API, and emits
// CSV/JSON results plus figure-data files.
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wffd.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CliError {
  int exit_code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int exit_code, const std::string& kind, const std::string& message) {
  throw CliError{exit_code, kind, message};
}

void check(int rc) {
  if (rc == WFFD_OK) return;
  const int exit_code = rc == WFFD_ERR_CONVERGENCE ? kExitNumeric : kExitConfig;
  fail(exit_code, wffd_error_name(rc), wffd_last_error());
}

std::uint64_t splitmix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// RAII wrappers around the C handles.
struct ConstellationHandle {
  wffd_constellation* ptr = nullptr;
  ~ConstellationHandle() { wffd_constellation_free(ptr); }
  ConstellationHandle() = default;
  ConstellationHandle(const ConstellationHandle&) = delete;
  ConstellationHandle& operator=(const ConstellationHandle&) = delete;
  ConstellationHandle(ConstellationHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
};

struct FadingHandle {
  wffd_fading* ptr = nullptr;
  ~FadingHandle() { wffd_fading_free(ptr); }
  FadingHandle() = default;
  FadingHandle(const FadingHandle&) = delete;
  FadingHandle& operator=(const FadingHandle&) = delete;
  FadingHandle(FadingHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
};

ConstellationHandle constellation_from_config(const json& spec) {
  ConstellationHandle h;
  if (spec.is_object() && spec.contains("pam")) {
    check(wffd_constellation_pam(spec.at("pam").get<int>(), &h.ptr));
    return h;
  }
  check(wffd_constellation_from_json(spec.dump().c_str(), &h.ptr));
  return h;
}

FadingHandle fading_from_config(const json& spec) {
  FadingHandle h;
  if (spec.is_object() && spec.value("type", "") == "degenerate") {
    check(wffd_fading_degenerate(spec.value("value", 1.0), &h.ptr));
    return h;
  }
  check(wffd_fading_from_json(spec.dump().c_str(), &h.ptr));
  return h;
}

struct Experiment {
  json config;
  wffd_channel_params params{1.0, 1.0};
  std::uint64_t seed = 1;
  std::string output_path;
  int jobs = 1;
  wffd_rate_options options{};

  json state_spec = json{{"pam", 2}};
  json fading_spec = json{{"type", "degenerate"}, {"value", 1.0}};
};

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitConfig, "invalid-config", "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(kExitConfig, "invalid-config", std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) fail(kExitConfig, "invalid-config", "config must be a JSON object");
  return j;
}

int parse_method(const std::string& name) {
  if (name == "auto") return WFFD_METHOD_AUTO;
  if (name == "quadrature") return WFFD_METHOD_QUADRATURE;
  if (name == "monte_carlo" || name == "monte-carlo") return WFFD_METHOD_MONTE_CARLO;
  fail(kExitConfig, "invalid-config", "unknown method: " + name);
}

int parse_mode(const std::string& name) {
  if (name == "ncsi") return WFFD_MODE_NCSI;
  if (name == "rcsi") return WFFD_MODE_RCSI;
  fail(kExitConfig, "invalid-config", "unknown mode: " + name);
}

// Flags override env (WFFD_SEED) which overrides the config file.
Experiment build_experiment(const json& config, const std::string& command,
                            const std::optional<double>& flag_P,
                            const std::optional<double>& flag_c,
                            const std::optional<std::uint64_t>& flag_seed,
                            const std::optional<std::string>& flag_output,
                            const std::optional<int>& flag_jobs,
                            const std::optional<int>& flag_pam) {
  Experiment ex;
  ex.config = config;
  if (config.contains("command")) {
    const std::string declared = config.at("command").get<std::string>();
    if (declared != command)
      fail(kExitConfig, "invalid-config",
           "config declares command '" + declared + "' but '" + command + "' was invoked");
  }
  try {
    if (config.contains("channel")) {
      ex.params.P = config.at("channel").value("P", 1.0);
      ex.params.c = config.at("channel").value("c", 1.0);
    }
    ex.seed = config.value("seed", std::uint64_t{1});
    ex.output_path = config.value("output_path", std::string{});
    ex.jobs = config.value("jobs", 1);
    if (config.contains("state")) ex.state_spec = config.at("state");
    if (config.contains("fading")) ex.fading_spec = config.at("fading");
    wffd_default_rate_options(&ex.options);
    if (config.contains("options")) {
      const json& o = config.at("options");
      ex.options.quad_abs_tol = o.value("abs_tol", ex.options.quad_abs_tol);
      ex.options.nested_tol = o.value("nested_tol", ex.options.nested_tol);
      ex.options.max_subdivisions = o.value("max_subdivisions", ex.options.max_subdivisions);
      ex.options.mc_budget = o.value("mc_budget", ex.options.mc_budget);
      ex.options.fading_samples = o.value("fading_samples", ex.options.fading_samples);
      ex.options.batches = o.value("batches", ex.options.batches);
      if (o.contains("method")) ex.options.method = parse_method(o.at("method").get<std::string>());
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    fail(kExitConfig, "invalid-config", std::string("bad config field: ") + e.what());
  }

  if (const char* env_seed = std::getenv("WFFD_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0')
      fail(kExitConfig, "invalid-config", "WFFD_SEED must be an unsigned integer");
    ex.seed = v;
  }
  if (flag_P) ex.params.P = *flag_P;
  if (flag_c) ex.params.c = *flag_c;
  if (flag_seed) ex.seed = *flag_seed;
  if (flag_output) ex.output_path = *flag_output;
  if (flag_jobs) ex.jobs = *flag_jobs;
  if (flag_pam) ex.state_spec = json{{"pam", *flag_pam}};
  ex.options.seed = ex.seed;
  return ex;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(kExitConfig, "io-error", "cannot write " + path);
  out << text;
}

json condition_json(const wffd_condition_report& r) {
  return json{{"min_gap", r.min_gap},
              {"satisfied", r.satisfied != 0},
              {"witness",
               json{{"i", r.witness_i},
                    {"s", r.witness_s},
                    {"a", r.witness_a},
                    {"s_tilde", r.witness_s_tilde},
                    {"a_tilde", r.witness_a_tilde}}},
              {"mode", r.mode == WFFD_MODE_NCSI ? "ncsi" : "rcsi"},
              {"note", r.note}};
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

struct RatePoint {
  std::string param = "-";
  double value = 0.0;
  wffd_rate_result result{};
  double P = 0.0;
  double c = 0.0;
  double k = 0.0;
};

bool op_is_inner_bound(const std::string& op) {
  return op == "costa" || op == "state-amplification" || op == "no-csit-gaussian" ||
         op == "linear-cancel";
}

wffd_rate_result evaluate_rate_op(const std::string& op, const Experiment& ex,
                                  wffd_channel_params params, double k, int mode,
                                  const wffd_rate_options& opts) {
  ConstellationHandle state = constellation_from_config(ex.state_spec);
  FadingHandle fading = fading_from_config(ex.fading_spec);
  wffd_rate_result out{};
  if (op == "awgn") {
    double bits = 0.0;
    check(wffd_awgn_capacity(params.P, &bits));
    out.rate = bits;
    std::snprintf(out.method, sizeof(out.method), "closed-form");
  } else if (op == "costa") {
    const bool gaussian_state =
        ex.state_spec.is_object() && ex.state_spec.value("gaussian", false);
    check(wffd_costa_mismatch_rate(params, k, gaussian_state ? nullptr : state.ptr, &opts,
                                   &out));
  } else if (op == "state-amplification") {
    check(wffd_state_amplification_rate(params, state.ptr, fading.ptr, mode, &opts, &out));
  } else if (op == "outer-bound") {
    double additive = 0.0;
    check(wffd_outer_bound(params, state.ptr, fading.ptr, mode, &opts, &out, &additive,
                           nullptr));
  } else if (op == "no-csit-gaussian") {
    check(wffd_no_csit_gaussian_rate(params, state.ptr, fading.ptr, &opts, &out));
  } else if (op == "linear-cancel") {
    const std::vector<double> grid = {0.60, 0.70, 0.80, 0.85, 0.90, 0.95, 0.98, 1.0};
    std::vector<wffd_rate_result> per(grid.size());
    size_t best = 0;
    check(wffd_linear_cancel_scan(params, state.ptr, fading.ptr, grid.data(), grid.size(),
                                  &opts, per.data(), &best));
    out = per[best];
    std::snprintf(out.method, sizeof(out.method), "linear-cancel(alpha=%.4g)", grid[best]);
  } else {
    fail(kExitConfig, "invalid-config", "unknown op: " + op);
  }
  return out;
}

int run_rates(const Experiment& ex) {
  const std::string op = ex.config.value("op", "state-amplification");
  const int mode = parse_mode(ex.config.value("mode", "ncsi"));
  const double base_k = ex.config.value("k", 1.0);

  std::vector<std::pair<std::string, double>> grid;
  if (ex.config.contains("sweep")) {
    const json& sw = ex.config.at("sweep");
    const std::string param = sw.at("param").get<std::string>();
    if (param != "P" && param != "c" && param != "c2" && param != "k")
      fail(kExitConfig, "invalid-config", "sweep.param must be one of P, c, c2, k");
    for (const auto& v : sw.at("values")) grid.emplace_back(param, v.get<double>());
    if (grid.empty()) fail(kExitConfig, "invalid-config", "sweep.values is empty");
  } else {
    grid.emplace_back("-", 0.0);
  }

  std::vector<RatePoint> points(grid.size());
  std::vector<CliError> errors;
  std::mutex err_mutex;
  auto eval_index = [&](std::size_t idx) {
    const auto& [param, value] = grid[idx];
    wffd_channel_params params = ex.params;
    double k = base_k;
    if (param == "P") params.P = value;
    if (param == "c") params.c = value;
    if (param == "c2") params.c = std::sqrt(value);
    if (param == "k") k = value;
    wffd_rate_options opts = ex.options;
    opts.seed = splitmix(ex.seed, idx);
    RatePoint pt;
    pt.param = param;
    pt.value = value;
    pt.P = params.P;
    pt.c = params.c;
    pt.k = k;
    pt.result = evaluate_rate_op(op, ex, params, k, mode, opts);
    points[idx] = pt;
  };

  const int jobs = std::max(1, ex.jobs);
  if (jobs == 1 || grid.size() == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) eval_index(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= grid.size()) return;
          try {
            eval_index(i);
          } catch (const CliError& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            errors.push_back(e);
          }
        }
      });
    for (auto& th : pool) th.join();
    if (!errors.empty()) throw errors.front();
  }

  std::ostringstream csv;
  csv << "param,value,op,mode,P,c,k,rate,rate_unclamped,numeric_error,samples_used,method\n";
  const bool clamp = op_is_inner_bound(op);
  for (const auto& pt : points) {
    const double shown = clamp ? std::max(0.0, pt.result.rate) : pt.result.rate;
    csv << pt.param << ',' << fmt(pt.value) << ',' << op << ','
        << (mode == WFFD_MODE_NCSI ? "ncsi" : "rcsi") << ',' << fmt(pt.P) << ',' << fmt(pt.c)
        << ',' << fmt(pt.k) << ',' << fmt(shown) << ',' << fmt(pt.result.rate) << ','
        << fmt(pt.result.numeric_error) << ',' << pt.result.samples_used << ','
        << pt.result.method << '\n';
  }
  if (!ex.output_path.empty())
    write_text_file(ex.output_path, csv.str());
  else
    std::cout << csv.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// conditions
// ---------------------------------------------------------------------------

int run_conditions(const Experiment& ex) {
  ConstellationHandle state = constellation_from_config(ex.state_spec);
  FadingHandle fading = fading_from_config(ex.fading_spec);
  const std::string mode = ex.config.value("mode", "both");
  json out = json::object();
  {
    // Both dirt-power readings: the engine works with c^2*E[A^2]; the
    // mean-only figure is listed alongside for comparison.
    const double mu = wffd_fading_mean(fading.ptr);
    const double e_a2 = wffd_fading_variance(fading.ptr) + mu * mu;
    out["diagnostics"] = json{
        {"effective_dirt_power", ex.params.c * ex.params.c * e_a2},
        {"mean_scaled_dirt_power", ex.params.c * ex.params.c * mu * mu}};
  }
  if (mode == "ncsi" || mode == "both") {
    wffd_condition_report rep{};
    check(wffd_ncsi_min_gap(ex.params, state.ptr, fading.ptr, &rep));
    out["ncsi"] = condition_json(rep);
  }
  if (mode == "rcsi" || mode == "both") {
    wffd_condition_report rep{};
    check(wffd_rcsi_min_gap(ex.params, state.ptr, fading.ptr, &rep));
    out["rcsi"] = condition_json(rep);
  }
  if (!out.contains("ncsi") && !out.contains("rcsi"))
    fail(kExitConfig, "invalid-config", "mode must be ncsi, rcsi, or both");
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!ex.output_path.empty()) write_text_file(ex.output_path, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

ConstellationHandle default_integer_input(double P) {
  const long long peak = static_cast<long long>(std::floor(std::sqrt(P)));
  std::vector<double> pts, probs;
  for (long long i = -peak; i <= peak; ++i) pts.push_back(static_cast<double>(i));
  probs.assign(pts.size(), 1.0 / static_cast<double>(pts.size()));
  ConstellationHandle h;
  check(wffd_constellation_create(pts.data(), probs.data(), pts.size(), &h.ptr));
  return h;
}

int run_simulate(const Experiment& ex) {
  ConstellationHandle state = constellation_from_config(ex.state_spec);
  FadingHandle fading = fading_from_config(ex.fading_spec);
  ConstellationHandle x_const =
      (ex.config.contains("x_const") && ex.config.at("x_const").is_object())
          ? constellation_from_config(ex.config.at("x_const"))
          : default_integer_input(ex.params.P);

  wffd_sim_config cfg{};
  cfg.n_symbols = ex.config.value("n_symbols", 100000LL);
  cfg.seed = ex.seed;
  cfg.noise_mode =
      ex.config.value("noise_mode", std::string("gaussian")) == "residual"
          ? WFFD_NOISE_RESIDUAL
          : WFFD_NOISE_GAUSSIAN;
  cfg.mode = parse_mode(ex.config.value("mode", "ncsi"));
  cfg.jobs = ex.jobs;

  wffd_sim_result res{};
  check(wffd_run_decoding_sim(&cfg, ex.params, x_const.ptr, state.ptr, fading.ptr, &res));

  const json out{{"joint_error_rate", res.joint_error_rate},
                 {"state_error_rate", res.state_error_rate},
                 {"input_error_rate", res.input_error_rate},
                 {"joint_wilson_halfwidth", wffd_wilson_halfwidth(res.joint_errors, res.n)},
                 {"n", res.n},
                 {"seed", res.seed}};
  std::cout << out.dump(2) << "\n";

  if (!ex.output_path.empty()) {
    // Appended CSV log; header only when the file starts empty.
    bool need_header = true;
    {
      std::ifstream probe(ex.output_path, std::ios::binary);
      need_header = !probe || probe.peek() == std::ifstream::traits_type::eof();
    }
    std::ofstream outf(ex.output_path, std::ios::binary | std::ios::app);
    if (!outf) fail(kExitConfig, "io-error", "cannot write " + ex.output_path);
    if (need_header) outf << "mode,noise_mode,P,c,m,n,joint,state,input,seed\n";
    outf << (cfg.mode == WFFD_MODE_NCSI ? "ncsi" : "rcsi") << ','
         << (cfg.noise_mode == WFFD_NOISE_RESIDUAL ? "residual" : "gaussian") << ','
         << fmt(ex.params.P) << ',' << fmt(ex.params.c) << ','
         << wffd_constellation_size(state.ptr) << ',' << res.n << ','
         << fmt(res.joint_error_rate) << ',' << fmt(res.state_error_rate) << ','
         << fmt(res.input_error_rate) << ',' << res.seed << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-appendix
// ---------------------------------------------------------------------------

int run_verify_appendix(const Experiment& ex) {
  json out;
  std::printf("%-34s %12s\n", "quantity", "value");
  std::printf("%-34s %12s\n", "----------------------------------", "------------");
  for (int i = 0; i <= 6; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "rho_z(%d)", i);
    std::printf("%-34s %12.4f\n", name, wffd_rho_z(i));
    out["rho_z"].push_back(wffd_rho_z(i));
  }
  const double h = wffd_quantized_noise_entropy();
  const double ig = wffd_integer_restriction_gap();
  std::printf("%-34s %12.6f\n", "H(round(2Z)/2) [bits]", h);
  std::printf("%-34s %12.6f\n", "H bound check (<= 4)", 4.0);
  std::printf("%-34s %12.6f\n", "integer restriction gap [bits]", ig);
  out["quantized_noise_entropy"] = h;
  out["quantized_noise_entropy_bound"] = 4.0;
  out["integer_restriction_gap"] = ig;

  // Entropy decomposition next to the claimed constants, no tolerance
  // applied: the stated pieces do not reproduce the exact sums.
  wffd_quantizer_entropy_terms terms{};
  wffd_quantized_noise_entropy_terms(&terms);
  std::printf("\n%-22s %12s %12s\n", "entropy decomposition", "computed", "claimed");
  std::printf("%-22s %12.6f %12.2f\n", "center bin (i=0)", terms.center,
              terms.claimed_center);
  std::printf("%-22s %12.6f %12.2f\n", "|i| in 1..3", terms.near_terms, terms.claimed_near);
  std::printf("%-22s %12.6f %12.2f  (%s)\n", "tail |i| >= 4", terms.tail, terms.claimed_tail,
              terms.tail_over_covered ? "claimed value over-covers the exact tail"
                                      : "claimed value under-covers the exact tail");
  std::printf("%-22s %12.6f %12.2f\n", "total", terms.total, terms.claimed_total);
  out["entropy_terms"] = json{{"center", terms.center},
                              {"near", terms.near_terms},
                              {"tail", terms.tail},
                              {"total", terms.total},
                              {"claimed", {terms.claimed_center, terms.claimed_near,
                                           terms.claimed_tail, terms.claimed_total}},
                              {"tail_over_covered", terms.tail_over_covered != 0}};

  for (int mode : {WFFD_MODE_NCSI, WFFD_MODE_RCSI}) {
    wffd_gap_breakdown b{};
    check(wffd_gap_breakdown_get(mode, &b));
    const char* name = mode == WFFD_MODE_NCSI ? "ncsi" : "rcsi";
    std::printf("\n[%s]\n", name);
    std::printf("%-34s %12.6f\n", "integer_restriction", b.integer_restriction);
    std::printf("%-34s %12.6f\n", "peak_restriction (claimed)", b.peak_restriction);
    std::printf("%-34s %12.6f\n", "quantized_noise_entropy", b.quantized_noise_entropy);
    std::printf("%-34s %12.6f\n", "additive_constant", b.additive_constant);
    std::printf("%-34s %12.6f\n", "total_claimed", b.total_claimed);
    std::printf("note: %s\n", b.note);
    out[name] = json{{"integer_restriction", b.integer_restriction},
                     {"peak_restriction", b.peak_restriction},
                     {"quantized_noise_entropy", b.quantized_noise_entropy},
                     {"additive_constant", b.additive_constant},
                     {"total_claimed", b.total_claimed},
                     {"note", b.note}};
  }
  const std::string text = out.dump(2) + "\n";
  std::printf("\n%s", text.c_str());
  if (!ex.output_path.empty()) write_text_file(ex.output_path, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// figure {2,3,5}
// ---------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

void write_svg(const std::string& path, const std::string& title,
               const std::vector<std::string>& names, const std::vector<double>& xs,
               const std::vector<std::vector<double>>& ys) {
  const int W = 640, H = 420, ML = 60, MR = 20, MT = 30, MB = 40;
  double xmin = xs.front(), xmax = xs.back();
  double ymin = 1e300, ymax = -1e300;
  for (const auto& col : ys)
    for (double v : col) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << W / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title
      << "</text>\n";
  svg << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
      << "' stroke='black'/>\n";
  svg << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
      << "' stroke='black'/>\n";
  for (std::size_t c = 0; c < ys.size(); ++c) {
    svg << "<polyline fill='none' stroke='" << colors[c % 6] << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < xs.size(); ++i)
      svg << X(xs[i]) << ',' << Y(ys[c][i]) << ' ';
    svg << "'/>\n";
    svg << "<text x='" << W - MR - 150 << "' y='" << MT + 16 * (c + 1) << "' fill='"
        << colors[c % 6] << "' font-size='12'>" << names[c] << "</text>\n";
  }
  char lab[64];
  std::snprintf(lab, sizeof(lab), "%.3g", ymin);
  svg << "<text x='8' y='" << H - MB << "' font-size='11'>" << lab << "</text>\n";
  std::snprintf(lab, sizeof(lab), "%.3g", ymax);
  svg << "<text x='8' y='" << MT + 6 << "' font-size='11'>" << lab << "</text>\n";
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

struct FigureJob {
  int figure = 2;
  int points = 0;  // 0 = per-figure default
  std::string svg_path;
};

int run_figure(const Experiment& ex, const FigureJob& job) {
  const int jobs = std::max(1, ex.jobs);
  std::ostringstream csv;
  std::vector<double> xs;
  std::vector<std::vector<double>> curves;
  std::vector<std::string> names;
  std::string default_output;
  std::string title;

  auto parallel_map = [&](std::size_t n, auto&& fn) {
    if (jobs == 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<CliError> errors;
    std::mutex err_mutex;
    const std::size_t n_workers = std::min(static_cast<std::size_t>(jobs), n);
    for (std::size_t w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (const CliError& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            errors.push_back(e);
          }
        }
      });
    for (auto& th : pool) th.join();
    if (!errors.empty()) throw errors.front();
  };

  if (job.figure == 2) {
    default_output = "fig2.csv";
    title = "Precoding rate vs state-gain estimate factor (P=10, c=5)";
    const wffd_channel_params params{10.0, 5.0};
    const std::vector<double> ks = linspace(0.0, 2.0, job.points > 0 ? job.points : 21);
    const int pams[] = {2, 4, 6};
    std::vector<std::vector<double>> rates(4, std::vector<double>(ks.size(), 0.0));
    parallel_map(ks.size(), [&](std::size_t i) {
      wffd_rate_options opts = ex.options;
      opts.seed = splitmix(ex.seed, i);
      for (int pi = 0; pi < 3; ++pi) {
        ConstellationHandle st;
        check(wffd_constellation_pam(pams[pi], &st.ptr));
        wffd_rate_result r{};
        check(wffd_costa_mismatch_rate(params, ks[i], st.ptr, &opts, &r));
        rates[static_cast<std::size_t>(pi)][i] = std::max(0.0, r.rate);
      }
      wffd_rate_result rg{};
      check(wffd_costa_mismatch_rate(params, ks[i], nullptr, &opts, &rg));
      rates[3][i] = std::max(0.0, rg.rate);
    });
    double cap = 0.0;
    check(wffd_awgn_capacity(params.P, &cap));
    csv << "k,rate_2pam,rate_4pam,rate_6pam,rate_gaussian,capacity\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
      csv << fmt(ks[i]) << ',' << fmt(rates[0][i]) << ',' << fmt(rates[1][i]) << ','
          << fmt(rates[2][i]) << ',' << fmt(rates[3][i]) << ',' << fmt(cap) << '\n';
    xs = ks;
    curves = {rates[0], rates[1], rates[2], rates[3],
              std::vector<double>(ks.size(), cap)};
    names = {"2-PAM", "4-PAM", "6-PAM", "gaussian", "capacity"};
  } else if (job.figure == 3) {
    default_output = "fig3.csv";
    title = "State-amplification rate vs state power (P=100, A=1)";
    const std::vector<double> c2s = linspace(100.0, 1000.0, job.points > 0 ? job.points : 10);
    const int pams[] = {2, 4, 6};
    std::vector<std::vector<double>> rates(3, std::vector<double>(c2s.size(), 0.0));
    parallel_map(c2s.size(), [&](std::size_t i) {
      wffd_rate_options opts = ex.options;
      opts.seed = splitmix(ex.seed, i);
      const wffd_channel_params params{100.0, std::sqrt(c2s[i])};
      // Default fading is the unit atom; a config can override it.
      FadingHandle fad = fading_from_config(ex.fading_spec);
      for (int pi = 0; pi < 3; ++pi) {
        ConstellationHandle st;
        check(wffd_constellation_pam(pams[pi], &st.ptr));
        wffd_rate_result r{};
        check(wffd_state_amplification_rate(params, st.ptr, fad.ptr, WFFD_MODE_NCSI, &opts,
                                            &r));
        rates[static_cast<std::size_t>(pi)][i] = std::max(0.0, r.rate);
      }
    });
    double cap = 0.0;
    check(wffd_awgn_capacity(100.0, &cap));
    csv << "c2,rate_2pam,rate_4pam,rate_6pam,capacity\n";
    for (std::size_t i = 0; i < c2s.size(); ++i)
      csv << fmt(c2s[i]) << ',' << fmt(rates[0][i]) << ',' << fmt(rates[1][i]) << ','
          << fmt(rates[2][i]) << ',' << fmt(cap) << '\n';
    xs = c2s;
    curves = {rates[0], rates[1], rates[2], std::vector<double>(c2s.size(), cap)};
    names = {"2-PAM", "4-PAM", "6-PAM", "capacity"};
  } else if (job.figure == 5) {
    default_output = "fig5.csv";
    title = "Gaussian signaling vs linear cancellation (c=2, A~N(0,1))";
    const std::vector<double> Ps = linspace(10.0, 70.0, job.points > 0 ? job.points : 5);
    const int pams[] = {2, 4, 6};
    const std::vector<double> grid = {0.60, 0.70, 0.80, 0.85, 0.90, 0.95, 0.98, 1.0};
    std::vector<std::vector<double>> gauss(3, std::vector<double>(Ps.size(), 0.0));
    std::vector<std::vector<double>> linear(3, std::vector<double>(Ps.size(), 0.0));
    std::vector<std::vector<double>> alpha(3, std::vector<double>(Ps.size(), 0.0));
    std::vector<double> caps(Ps.size(), 0.0);
    parallel_map(Ps.size(), [&](std::size_t i) {
      wffd_rate_options opts = ex.options;
      opts.seed = splitmix(ex.seed, i);
      const wffd_channel_params params{Ps[i], 2.0};
      FadingHandle fad;
      check(wffd_fading_gaussian(0.0, 1.0, &fad.ptr));
      for (int pi = 0; pi < 3; ++pi) {
        ConstellationHandle st;
        check(wffd_constellation_pam(pams[pi], &st.ptr));
        wffd_rate_result rg{};
        check(wffd_no_csit_gaussian_rate(params, st.ptr, fad.ptr, &opts, &rg));
        std::vector<wffd_rate_result> per(grid.size());
        size_t best = 0;
        check(wffd_linear_cancel_scan(params, st.ptr, fad.ptr, grid.data(), grid.size(),
                                      &opts, per.data(), &best));
        gauss[static_cast<std::size_t>(pi)][i] = std::max(0.0, rg.rate);
        linear[static_cast<std::size_t>(pi)][i] = std::max(0.0, per[best].rate);
        alpha[static_cast<std::size_t>(pi)][i] = grid[best];
      }
      check(wffd_awgn_capacity(Ps[i], &caps[i]));
    });
    csv << "P,gaussian_2pam,linear_2pam,alpha_2pam,gaussian_4pam,linear_4pam,alpha_4pam,"
           "gaussian_6pam,linear_6pam,alpha_6pam,capacity\n";
    for (std::size_t i = 0; i < Ps.size(); ++i) {
      csv << fmt(Ps[i]);
      for (int pi = 0; pi < 3; ++pi)
        csv << ',' << fmt(gauss[static_cast<std::size_t>(pi)][i]) << ','
            << fmt(linear[static_cast<std::size_t>(pi)][i]) << ','
            << fmt(alpha[static_cast<std::size_t>(pi)][i]);
      csv << ',' << fmt(caps[i]) << '\n';
    }
    xs = Ps;
    curves = {gauss[0], linear[0], gauss[1], linear[1], gauss[2], linear[2]};
    names = {"2-PAM gaussian", "2-PAM linear", "4-PAM gaussian",
             "4-PAM linear",   "6-PAM gaussian", "6-PAM linear"};
  } else {
    fail(kExitConfig, "invalid-config", "figure must be 2, 3, or 5");
  }

  const std::string path = ex.output_path.empty() ? default_output : ex.output_path;
  write_text_file(path, csv.str());
  std::cout << "wrote " << path << "\n";
  if (!job.svg_path.empty()) {
    write_svg(job.svg_path, title, names, xs, curves);
    std::cout << "wrote " << job.svg_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& argv_vec) {
  CLI::App app{"WFFD channel numerics: rates, separation conditions, gap constants, and "
               "decoding simulation"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<double> flag_P, flag_c;
  std::optional<std::uint64_t> flag_seed;
  std::optional<std::string> flag_output;
  std::optional<int> flag_jobs, flag_pam;

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config)
      cmd->add_option("config", config_path, "JSON experiment config (flags override fields)");
    cmd->add_option("--P", [&](const CLI::results_t& r) { flag_P = std::stod(r[0]); return true; },
                    "channel power budget P");
    cmd->add_option("--c", [&](const CLI::results_t& r) { flag_c = std::stod(r[0]); return true; },
                    "state gain c");
    cmd->add_option("--seed",
                    [&](const CLI::results_t& r) { flag_seed = std::stoull(r[0]); return true; },
                    "RNG seed (overrides WFFD_SEED and the config)");
    cmd->add_option("--output",
                    [&](const CLI::results_t& r) { flag_output = r[0]; return true; },
                    "output file path");
    cmd->add_option("--jobs",
                    [&](const CLI::results_t& r) { flag_jobs = std::stoi(r[0]); return true; },
                    "worker threads for sweeps/batches");
    cmd->add_option("--pam",
                    [&](const CLI::results_t& r) { flag_pam = std::stoi(r[0]); return true; },
                    "use an equiprobable m-PAM state");
  };

  std::string rates_op, rates_mode, rates_method;
  double rates_k = std::nan("");
  CLI::App* rates = app.add_subcommand(
      "rates", "rate computations (CSV: param,value,op,mode,P,c,k,rate,...)");
  add_common(rates, true);
  rates->add_option("--op", rates_op,
                    "awgn | costa | state-amplification | outer-bound | no-csit-gaussian | "
                    "linear-cancel");
  rates->add_option("--mode", rates_mode, "ncsi | rcsi");
  rates->add_option("--k", rates_k, "state-gain estimate factor for costa");
  rates->add_option("--method", rates_method, "auto | quadrature | monte_carlo");

  std::string cond_mode;
  CLI::App* conditions = app.add_subcommand(
      "conditions", "separation-condition reports (JSON: min_gap, satisfied, witness)");
  add_common(conditions, true);
  conditions->add_option("--mode", cond_mode, "ncsi | rcsi | both");

  std::string sim_noise, sim_mode;
  long long sim_n = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate",
      "uncoded (X,S) decoding simulation; appends CSV rows "
      "(mode,noise_mode,P,c,m,n,joint,state,input,seed)");
  add_common(simulate, true);
  simulate->add_option("--noise-mode", sim_noise, "gaussian | residual");
  simulate->add_option("--mode", sim_mode, "ncsi | rcsi");
  simulate->add_option("--n-symbols", sim_n, "number of channel uses (>= 10^4)");

  CLI::App* verify = app.add_subcommand(
      "verify-appendix", "gap-derivation constants as a table plus JSON");
  add_common(verify, true);

  FigureJob fig_job;
  CLI::App* figure = app.add_subcommand(
      "figure",
      "figure-data CSV recipes. 2: precoding vs estimate factor at P=10, c=5 "
      "(k,rate_2pam,rate_4pam,rate_6pam,rate_gaussian,capacity). 3: state "
      "amplification vs state power at P=100 "
      "(c2,rate_2pam,rate_4pam,rate_6pam,capacity). 5: gaussian signaling vs "
      "linear cancellation at c=2, A~N(0,1) "
      "(P,gaussian_mpam,linear_mpam,alpha_mpam per m in {2,4,6}, capacity)");
  figure->add_option("n", fig_job.figure, "figure number: 2, 3, or 5")->required();
  add_common(figure, false);
  figure->add_option("--points", fig_job.points, "sweep grid density override");
  figure->add_option("--svg", fig_job.svg_path, "also write a minimal SVG line plot");

  std::vector<std::string> args = argv_vec;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::exit(app.exit(e));
    }
    fail(kExitConfig, "usage-error", e.what());
  }

  json config = json::object();
  if (!config_path.empty()) config = load_config_file(config_path);

  auto finish_config = [&](CLI::App* cmd, const std::string& name) {
    (void)cmd;
    Experiment ex = build_experiment(config, name, flag_P, flag_c, flag_seed, flag_output,
                                     flag_jobs, flag_pam);
    return ex;
  };

  if (rates->parsed()) {
    Experiment ex = finish_config(rates, "rates");
    if (!rates_op.empty()) ex.config["op"] = rates_op;
    if (!rates_mode.empty()) ex.config["mode"] = rates_mode;
    if (!std::isnan(rates_k)) ex.config["k"] = rates_k;
    if (!rates_method.empty()) ex.options.method = parse_method(rates_method);
    return run_rates(ex);
  }
  if (conditions->parsed()) {
    Experiment ex = finish_config(conditions, "conditions");
    if (!cond_mode.empty()) ex.config["mode"] = cond_mode;
    return run_conditions(ex);
  }
  if (simulate->parsed()) {
    Experiment ex = finish_config(simulate, "simulate");
    if (!sim_noise.empty()) ex.config["noise_mode"] = sim_noise;
    if (!sim_mode.empty()) ex.config["mode"] = sim_mode;
    if (sim_n > 0) ex.config["n_symbols"] = sim_n;
    return run_simulate(ex);
  }
  if (verify->parsed()) {
    Experiment ex = finish_config(verify, "verify-appendix");
    return run_verify_appendix(ex);
  }
  if (figure->parsed()) {
    Experiment ex = finish_config(figure, "figure");
    return run_figure(ex, fig_job);
  }
  fail(kExitConfig, "usage-error",
       "expected a subcommand: rates | conditions | simulate | verify-appendix | figure");
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    return run_command(args);
  } catch (const CliError& e) {
    const json err{{"error", {{"code", e.exit_code}, {"kind", e.kind}, {"message", e.message}}}};
    std::cout << err.dump() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    const json err{{"error", {{"code", kExitConfig}, {"kind", "internal"}, {"message", e.what()}}}};
    std::cout << err.dump() << "\n";
    return kExitConfig;
  }
}
