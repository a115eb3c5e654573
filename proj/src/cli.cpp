#include "ccik/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <system_error>

#include <CLI11.hpp>

#include "ccik/io.hpp"

namespace ccik::cli {

namespace {

using io::Json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto comma = text.find(',');
    parts.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(key) + ": not a finite number: '" + s + "'");
  }
  return v;
}

long long parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string(key) + ": not an integer: '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(std::string(key) + ": out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view text) {
  std::string s(trim(text));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument(std::string(key) + ": not a boolean: '" + s + "'");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::vector<int> out;
  for (auto part : split_list(text)) {
    if (const auto dots = part.find(".."); dots != std::string_view::npos) {
      const int lo = parse_int(key, part.substr(0, dots));
      const int hi = parse_int(key, part.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument(std::string(key) + ": empty range");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_int(key, part));
    }
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto part : split_list(text)) out.push_back(parse_double(key, part));
  return out;
}

std::vector<Method> parse_method_list(std::string_view text) {
  if (trim(text) == "all") return {Method::Jacobian, Method::Vvl, Method::Dls};
  std::vector<Method> out;
  for (auto part : split_list(text)) {
    const auto m = parse_method(part);
    if (!m) throw std::invalid_argument("method: unknown method '" + std::string(part) + "'");
    out.push_back(*m);
  }
  return out;
}

}  // namespace

void RunConfig::apply_setting(std::string_view raw_key, std::string_view value) {
  std::string key(trim(raw_key));
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "method") {
    spec.methods = parse_method_list(value);
    list_valued |= spec.methods.size() > 1;
    solver.method = spec.methods.front();
  } else if (key == "beta") {
    solver.beta = parse_double(key, value);
  } else if (key == "lambda") {
    solver.lambda = parse_double(key, value);
  } else if (key == "tol") {
    spec.tolerances = parse_double_list(key, value);
    list_valued |= spec.tolerances.size() > 1;
    solver.tol = spec.tolerances.front();
  } else if (key == "max-iter") {
    spec.iteration_limits = parse_int_list(key, value);
    list_valued |= spec.iteration_limits.size() > 1;
    solver.max_iter = spec.iteration_limits.front();
  } else if (key == "segments") {
    spec.segment_counts = parse_int_list(key, value);
  } else if (key == "trials") {
    spec.trials_per_config = parse_int(key, value);
  } else if (key == "theta-max") {
    spec.theta_max = parse_double(key, value);
  } else if (key == "seed") {
    const long long s = parse_integer(key, value);
    if (s < 0) throw std::invalid_argument("seed: must be non-negative");
    spec.master_seed = static_cast<std::uint64_t>(s);
  } else if (key == "vvl-factor") {
    solver.vvl_initial_length_factor = parse_double(key, value);
  } else if (key == "out-dir") {
    out_dir = std::string(trim(value));
  } else if (key == "trajectory") {
    write_trajectory = parse_bool(key, value);
  } else if (key == "samples") {
    workspace_samples = parse_int(key, value);
  } else if (key == "input") {
    input = std::string(trim(value));
  } else {
    throw std::invalid_argument("unknown setting '" + key + "'");
  }
}

void RunConfig::validate() const {
  solver.validate();
  if (command == Command::Solve) {
    if (input.empty()) throw std::invalid_argument("solve: an input file is required");
    if (list_valued) {
      throw std::invalid_argument("solve: method, tol and max-iter take a single value");
    }
  }
  if (command == Command::Bench || command == Command::Workspace) {
    spec.validate();
    for (int n : spec.segment_counts) {
      if (n < 1 || n > static_cast<int>(kDefaultMaxSegments)) {
        throw std::invalid_argument("segments: counts must lie in [1, " +
                                    std::to_string(kDefaultMaxSegments) + "]");
      }
    }
  }
  if (command == Command::Workspace && workspace_samples < 1) {
    throw std::invalid_argument("samples: must be at least 1");
  }
}

ManipulatorState demo_target() {
  constexpr double pi = std::numbers::pi;
  const double kappa[] = {pi / 2, pi / 3, pi / 4, pi / 5};
  const double phi[] = {pi / 5, pi / 4, pi / 2, 3 * pi / 4};
  ManipulatorState s;
  for (int i = 0; i < 4; ++i) s.segments.push_back({kappa[i], phi[i], 1.0, 1.0});
  return s;
}

ManipulatorState demo_adverse_start() {
  ManipulatorState s = demo_target();
  for (auto& seg : s.segments) {
    seg.kappa *= 0.5;
    seg.phi += std::numbers::pi;
  }
  return s;
}

std::vector<DemoRun> run_demo(const SolverOptions& base) {
  const ManipulatorState target = demo_target();
  const Pose goal = forward_kinematics(target);
  const Eigen::VectorXd L = target.nominal_lengths();
  const std::span<const double> nominal(L.data(), static_cast<std::size_t>(L.size()));

  auto options = [&](Method m) {
    SolverOptions o = base;
    o.method = m;
    o.tol = 1e-8;
    o.max_iter = 500;
    return o;
  };

  std::vector<DemoRun> runs;
  const SolverOptions jac = options(Method::Jacobian);
  runs.push_back({"rest_jacobian", Method::Jacobian,
                  solve(make_initial_guess(target.size(), nominal, jac), goal, jac)});
  runs.push_back({"adverse_jacobian", Method::Jacobian, solve(demo_adverse_start(), goal, jac)});
  const SolverOptions vvl = options(Method::Vvl);
  runs.push_back({"rest_vvl", Method::Vvl,
                  solve(make_initial_guess(target.size(), nominal, vvl), goal, vvl)});
  return runs;
}

namespace {

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw io::IoError("cannot create output directory " + dir.string());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  io::atomic_write(path, j.dump(2) + "\n");
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const io::IoError& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitIo;
  } catch (const io::ParseError& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const Json::exception& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitBadInput;
  }
}

struct SolveInput {
  Pose target;
  ManipulatorState initial;
};

SolveInput read_solve_input(const RunConfig& config) {
  std::ifstream f(config.input);
  if (!f) throw io::IoError("cannot open " + config.input.string());
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw io::ParseError(config.input.string() + ": " + e.what());
  }
  if (!j.is_object()) throw io::ParseError(config.input.string() + ": expected an object");

  SolveInput in;
  std::vector<double> nominal;
  if (j.contains("target_configuration")) {
    const ManipulatorState target = io::state_from_json(j["target_configuration"]);
    in.target = forward_kinematics(target);
    const auto L = target.nominal_lengths();
    nominal.assign(L.data(), L.data() + L.size());
  } else if (j.contains("target_pose")) {
    in.target = io::pose_from_json(j["target_pose"]);
    try {
      nominal = j.at("nominal_lengths").get<std::vector<double>>();
    } catch (const Json::exception&) {
      throw io::ParseError("target_pose requires a nominal_lengths array");
    }
  } else {
    throw io::ParseError(config.input.string() + ": needs target_configuration or target_pose");
  }

  if (j.contains("initial")) {
    in.initial = io::state_from_json(j["initial"]);
    if (in.initial.size() != nominal.size()) {
      throw io::ParseError("initial configuration has the wrong number of segments");
    }
  } else {
    try {
      in.initial = make_initial_guess(nominal.size(), nominal, config.solver);
    } catch (const std::invalid_argument& e) {
      throw io::ParseError(e.what());
    }
  }
  return in;
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const SolveInput in = read_solve_input(config);
    SolverOptions opts = config.solver;
    opts.record_trajectory = config.write_trajectory;
    const SolveResult r = solve(in.initial, in.target, opts);

    ensure_out_dir(config.out_dir);
    write_json(config.out_dir / "result.json", io::result_to_json(r, opts.method));
    if (config.write_trajectory) {
      write_json(config.out_dir / "trajectory.json",
                 io::trajectory_to_json(r, opts.method, in.target));
    }
    out << to_string(opts.method) << " converged=" << (r.converged ? "true" : "false")
        << " iterations=" << r.iterations << " final_error=" << io::format_double(r.final_error)
        << " fail_cause=" << to_string(r.fail_cause) << '\n';
    return kExitOk;
  });
}

int cmd_demo(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.solver.validate();
    const Pose goal = forward_kinematics(demo_target());
    SolverOptions base = config.solver;
    base.record_trajectory = true;
    const auto runs = run_demo(base);

    ensure_out_dir(config.out_dir);
    char line[128];
    std::snprintf(line, sizeof line, "%-18s %-9s %-10s %6s %14s %s\n", "run", "method",
                  "converged", "iters", "final_error", "deadlock");
    out << line;
    for (const auto& run : runs) {
      write_json(config.out_dir / ("trajectory_" + run.name + ".json"),
                 io::trajectory_to_json(run.result, run.method, goal));
      std::string flags;
      for (bool b : run.result.deadlock_flags) flags += b ? '1' : '0';
      std::snprintf(line, sizeof line, "%-18s %-9s %-10s %6d %14.6e %s\n", run.name.c_str(),
                    std::string(to_string(run.method)).c_str(),
                    run.result.converged ? "yes" : "no", run.result.iterations,
                    run.result.final_error, flags.c_str());
      out << line;
    }
    return kExitOk;
  });
}

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    bench::BenchmarkSpec spec = config.spec;
    spec.solver = config.solver;
    ensure_out_dir(config.out_dir);

    const auto records = bench::run_suite(spec, config.workers);
    std::ostringstream csv;
    io::write_trials_csv(csv, records);
    io::atomic_write(config.out_dir / "trials.csv", csv.str());
    const auto summary = bench::aggregate(records, spec);
    write_json(config.out_dir / "summary.json", io::summary_to_json(summary));

    char line[128];
    std::snprintf(line, sizeof line, "%-9s %3s %6s %9s %8s %10s\n", "method", "n", "limit", "tol",
                  "success", "mean_iter");
    out << line;
    for (const auto& c : summary.cells) {
      std::snprintf(line, sizeof line, "%-9s %3d %6d %9.1e %8.3f %10.2f\n",
                    std::string(to_string(c.method)).c_str(), c.n_segments, c.iter_limit,
                    c.tolerance, c.success_rate, c.mean_iter_converged.value_or(NAN));
      out << line;
    }
    return kExitOk;
  });
}

int cmd_workspace(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    bench::BenchmarkSpec spec = config.spec;
    spec.solver = config.solver;
    ensure_out_dir(config.out_dir);

    std::vector<io::WorkspaceRow> rows;
    for (int n : spec.segment_counts) {
      const auto seed = bench::hash_words({spec.master_seed, 0x776f726b7370ULL,
                                           static_cast<std::uint64_t>(n)});
      for (const auto& p : bench::sample_workspace(seed, n, config.workspace_samples, spec)) {
        rows.push_back({"reachable", "none", n, p.tip});
      }
    }
    std::size_t failed = 0;
    for (const auto& r : bench::run_suite(spec, config.workers)) {
      if (r.converged) continue;
      rows.push_back({"failed", std::string(to_string(r.method)), r.n_segments, r.target_tip});
      ++failed;
    }
    std::ostringstream csv;
    io::write_workspace_csv(csv, rows);
    io::atomic_write(config.out_dir / "workspace.csv", csv.str());
    out << "reachable=" << rows.size() - failed << " failed=" << failed << '\n';
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constant-curvature continuum manipulator inverse kinematics", "cc-ik"};
  app.require_subcommand(1);

  static constexpr std::string_view kKeys[] = {
      "method", "beta",      "lambda", "tol",     "max-iter",  "segments", "trials",
      "theta-max", "seed",   "vvl-factor", "out-dir", "samples", "input"};
  std::map<std::string, std::string> values;
  std::map<std::string, std::vector<CLI::Option*>> options;
  std::string config_file;
  std::vector<CLI::Option*> config_opts;
  std::vector<CLI::Option*> trajectory_opts;

  struct Sub {
    const char* name;
    const char* help;
    Command command;
    CLI::App* app = nullptr;
  };
  Sub subs[] = {{"solve", "Solve one inverse kinematics problem", Command::Solve},
                {"demo", "Run the built-in four-segment demo", Command::Demo},
                {"bench", "Run a randomised benchmark suite", Command::Bench},
                {"workspace", "Sample the workspace and failed targets", Command::Workspace}};

  for (auto& sub : subs) {
    sub.app = app.add_subcommand(sub.name, sub.help);
    config_opts.push_back(sub.app->add_option("--config", config_file, "key = value settings file"));
    for (auto key : kKeys) {
      const std::string k(key);
      options[k].push_back(sub.app->add_option("--" + k, values[k]));
    }
    trajectory_opts.push_back(
        sub.app->add_flag("--trajectory", "Write trajectory.json (solve)"));
    if (sub.command == Command::Solve) {
      options["input"].push_back(sub.app->add_option("target", values["input"], "target file"));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "cc-ik: " << e.what() << '\n';
    return kExitBadInput;
  }

  RunConfig config;
  for (const auto& sub : subs) {
    if (sub.app->parsed()) config.command = sub.command;
  }

  const int rc = guarded(err, [&] {
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw io::IoError("cannot open " + config_file);
      for (const auto& [k, v] : io::parse_key_values(f)) config.apply_setting(k, v);
    }
    for (const auto& [k, opts] : options) {
      for (auto* o : opts) {
        if (o->count() > 0) config.apply_setting(k, values[k]);
      }
    }
    for (auto* o : trajectory_opts) {
      if (o->count() > 0) config.write_trajectory = true;
    }
    return kExitOk;
  });
  if (rc != kExitOk) return rc;

  switch (config.command) {
    case Command::Solve: return cmd_solve(config, out, err);
    case Command::Demo: return cmd_demo(config, out, err);
    case Command::Bench: return cmd_bench(config, out, err);
    case Command::Workspace: return cmd_workspace(config, out, err);
  }
  return kExitBadInput;
}

}  // namespace ccik::cli
