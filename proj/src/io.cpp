#include "ccik/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Geometry>

namespace ccik::io {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json pose_to_json(const Pose& T) {
  Eigen::Quaterniond q(T.R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {{"quaternion", {q.w(), q.x(), q.y(), q.z()}},
          {"translation", {T.p.x(), T.p.y(), T.p.z()}}};
}

Pose pose_from_json(const Json& j) {
  try {
    const auto& q = j.at("quaternion");
    const auto& t = j.at("translation");
    if (q.size() != 4 || t.size() != 3) throw ParseError("pose needs 4 quaternion and 3 translation entries");
    Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                            q[3].get<double>());
    if (!(quat.norm() > 0.0) || !std::isfinite(quat.norm())) throw ParseError("degenerate quaternion");
    quat.normalize();
    return {quat.toRotationMatrix(), {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()}};
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid pose: ") + e.what());
  }
}

Json state_to_json(const ManipulatorState& state) {
  Json segments = Json::array();
  for (const auto& s : state.segments) {
    segments.push_back({{"kappa", s.kappa}, {"phi", s.phi}, {"l", s.length}, {"L", s.nominal_length}});
  }
  return {{"segments", segments}};
}

ManipulatorState state_from_json(const Json& j) {
  ManipulatorState state;
  try {
    const Json& segments = j.is_array() ? j : j.at("segments");
    for (const auto& s : segments) {
      SegmentState seg;
      seg.kappa = s.at("kappa").get<double>();
      seg.phi = s.at("phi").get<double>();
      seg.nominal_length = s.value("L", s.contains("l") ? s["l"].get<double>() : 1.0);
      seg.length = s.value("l", seg.nominal_length);
      state.segments.push_back(seg);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid configuration: ") + e.what());
  }
  try {
    state.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return state;
}

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json result_to_json(const SolveResult& result, Method method) {
  return {
      {"method", to_string(method)},
      {"converged", result.converged},
      {"iterations", result.iterations},
      {"final_error", finite_or_null(result.final_error)},
      {"fail_cause", to_string(result.fail_cause)},
      {"deadlock_flags", result.deadlock_flags},
      {"final_state", state_to_json(result.final_state)},
      {"final_pose", pose_to_json(forward_kinematics(result.final_state))},
  };
}

SolveResult result_from_json(const Json& j) {
  SolveResult r;
  try {
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    const auto& e = j.at("final_error");
    r.final_error = e.is_null() ? std::numeric_limits<double>::infinity() : e.get<double>();
    const auto cause = parse_fail_cause(j.at("fail_cause").get<std::string>());
    if (!cause) throw ParseError("unknown fail_cause");
    r.fail_cause = *cause;
    r.deadlock_flags = j.at("deadlock_flags").get<std::vector<bool>>();
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("invalid result: ") + ex.what());
  }
  r.final_state = state_from_json(j.at("final_state"));
  if (r.deadlock_flags.size() != r.final_state.size()) {
    throw ParseError("deadlock_flags length does not match segment count");
  }
  if (r.converged && r.fail_cause != FailCause::None) {
    throw ParseError("converged result carries a failure cause");
  }
  return r;
}

namespace {

Json polyline(const ManipulatorState& state, std::size_t samples) {
  Json pts = Json::array();
  for (const auto& p : centerline(state, samples)) pts.push_back({p.x(), p.y(), p.z()});
  return pts;
}

}  // namespace

Json trajectory_to_json(const SolveResult& result, Method method, const Pose& target,
                        std::size_t samples_per_segment) {
  Json steps = Json::array();
  for (const auto& step : result.trajectory) {
    steps.push_back({{"iteration", step.iteration},
                     {"error", finite_or_null(step.error)},
                     {"segments", state_to_json(step.state)["segments"]},
                     {"centerline", polyline(step.state, samples_per_segment)}});
  }
  return {
      {"method", to_string(method)},
      {"target_pose", pose_to_json(target)},
      {"converged", result.converged},
      {"iterations", result.iterations},
      {"final_error", finite_or_null(result.final_error)},
      {"trajectory", steps},
      {"final_state", state_to_json(result.final_state)},
      {"final_centerline", polyline(result.final_state, samples_per_segment)},
  };
}

Json summary_to_json(const bench::BenchmarkSummary& summary) {
  Json cells = Json::array();
  for (const auto& c : summary.cells) {
    cells.push_back({
        {"method", to_string(c.method)},
        {"n_segments", c.n_segments},
        {"iter_limit", c.iter_limit},
        {"tolerance", c.tolerance},
        {"trial_count", c.trial_count},
        {"success_rate", c.success_rate},
        {"mean_iter_converged", c.mean_iter_converged ? Json(*c.mean_iter_converged) : Json(nullptr)},
        {"mean_iter_paired", c.mean_iter_paired ? Json(*c.mean_iter_paired) : Json(nullptr)},
        {"deadlock_rate", c.deadlock_rate},
    });
  }
  return cells;
}

void write_trials_csv(std::ostream& out, const std::vector<bench::TrialRecord>& records) {
  out << kTrialsCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.trial_id << ',' << to_string(r.method) << ',' << r.n_segments << ',' << r.iter_limit
        << ',' << format_double(r.tolerance) << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ','
        << r.iterations << ',' << format_double(r.final_error) << ',' << (r.deadlock_any ? 1 : 0)
        << ',' << to_string(r.fail_cause) << ',' << format_double(r.target_tip.x()) << ','
        << format_double(r.target_tip.y()) << ',' << format_double(r.target_tip.z()) << ','
        << r.wall_time_us << '\n';
  }
}

void write_workspace_csv(std::ostream& out, const std::vector<WorkspaceRow>& rows) {
  out << kWorkspaceCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.label << ',' << r.method << ',' << r.n_segments << ',' << format_double(r.position.x())
        << ',' << format_double(r.position.y()) << ',' << format_double(r.position.z()) << '\n';
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

}  // namespace ccik::io
