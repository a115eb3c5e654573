#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccik/bench.hpp"
#include "ccik/cc_model.hpp"
#include "ccik/solvers.hpp"

namespace ccik::io {

using Json = nlohmann::ordered_json;

/// Malformed or semantically invalid input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTrialsCsvHeader =
    "trial_id,method,n_segments,iter_limit,tolerance,seed,converged,iterations,final_error,"
    "deadlock_any,fail_cause,target_x,target_y,target_z,wall_time_us";
inline constexpr std::string_view kWorkspaceCsvHeader = "label,method,n_segments,x,y,z";

/// Shortest representation that parses back to the same double (%.17g).
std::string format_double(double x);

// Poses travel as unit quaternion (w, x, y, z) plus translation.
Json pose_to_json(const Pose& T);
Pose pose_from_json(const Json& j);

Json state_to_json(const ManipulatorState& state);
ManipulatorState state_from_json(const Json& j);

Json result_to_json(const SolveResult& result, Method method);
SolveResult result_from_json(const Json& j);

Json trajectory_to_json(const SolveResult& result, Method method, const Pose& target,
                        std::size_t samples_per_segment = 16);

Json summary_to_json(const bench::BenchmarkSummary& summary);

void write_trials_csv(std::ostream& out, const std::vector<bench::TrialRecord>& records);

struct WorkspaceRow {
  std::string label;   // "reachable" or "failed"
  std::string method;  // "none" for reachable rows
  int n_segments = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};
void write_workspace_csv(std::ostream& out, const std::vector<WorkspaceRow>& rows);

/// `key = value` lines; '#' starts a comment. Throws ParseError on malformed lines.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Writes to a sibling temporary file and renames it over `path`. Throws IoError.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace ccik::io
