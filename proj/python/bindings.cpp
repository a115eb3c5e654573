#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccik/bench.hpp"
#include "ccik/cc_model.hpp"
#include "ccik/cli.hpp"
#include "ccik/liegroup.hpp"
#include "ccik/solvers.hpp"

namespace py = pybind11;
using namespace ccik;

namespace {

py::dict jacobian_dict(const JacobianMatrix& J) {
  py::list labels;
  for (const auto& tag : J.columns) labels.append(to_string(tag));
  py::dict d;
  d["entries"] = J.entries;
  d["columns"] = labels;
  d["constraint_rows"] = J.constraint_rows;
  return d;
}

std::vector<double> nominal_of(const ManipulatorState& s) {
  std::vector<double> out;
  for (const auto& seg : s.segments) out.push_back(seg.nominal_length);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constant-curvature continuum manipulator kinematics and inverse kinematics";

  py::register_exception<LogBranchError>(m, "LogBranchError", PyExc_ValueError);

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init([](const Eigen::Matrix3d& R, const Eigen::Vector3d& p) { return Pose{R, p}; }),
           py::arg("R"), py::arg("p"))
      .def_static("from_matrix", &Pose::from_matrix)
      .def_readwrite("R", &Pose::R)
      .def_readwrite("p", &Pose::p)
      .def("matrix", &Pose::matrix)
      .def("inverse", &Pose::inverse)
      .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; });

  m.def("skew3", &skew3);
  m.def("twist_hat", &twist_hat);
  m.def("twist_vee", &twist_vee);
  m.def("exp_se3", &exp_se3, py::arg("twist"));
  m.def("log_se3", &log_se3, py::arg("pose"));
  m.def("adjoint_of_pose", &adjoint_of_pose);
  m.def("ad_of_twist", &ad_of_twist);
  m.def("pseudo_inverse", [](const Eigen::MatrixXd& M) { return pseudo_inverse(M); });

  py::class_<SegmentState>(m, "SegmentState")
      .def(py::init([](double kappa, double phi, double length, std::optional<double> nominal) {
             return SegmentState{kappa, phi, length, nominal.value_or(length)};
           }),
           py::arg("kappa") = 0.0, py::arg("phi") = 0.0, py::arg("length") = 1.0,
           py::arg("nominal_length") = py::none())
      .def_readwrite("kappa", &SegmentState::kappa)
      .def_readwrite("phi", &SegmentState::phi)
      .def_readwrite("length", &SegmentState::length)
      .def_readwrite("nominal_length", &SegmentState::nominal_length)
      .def(py::self == py::self)
      .def("__repr__", [](const SegmentState& s) {
        return "SegmentState(kappa=" + std::to_string(s.kappa) + ", phi=" + std::to_string(s.phi) +
               ", length=" + std::to_string(s.length) + ", nominal_length=" + std::to_string(s.nominal_length) + ")";
      });

  py::class_<ManipulatorState>(m, "ManipulatorState")
      .def(py::init<>())
      .def(py::init([](std::vector<SegmentState> segs) { return ManipulatorState{std::move(segs)}; }),
           py::arg("segments"))
      .def_readwrite("segments", &ManipulatorState::segments)
      .def("__len__", &ManipulatorState::size)
      .def("validate", &ManipulatorState::validate, py::arg("max_segments") = kDefaultMaxSegments)
      .def(py::self == py::self);

  m.def("segment_twist", &segment_twist);
  m.def("partial_twist_kappa", &partial_twist_kappa);
  m.def("partial_twist_phi", &partial_twist_phi);
  m.def("partial_twist_length", &partial_twist_length);
  m.def("forward_kinematics", &forward_kinematics, py::arg("state"));
  m.def("jacobian_standard", [](const ManipulatorState& s) { return jacobian_dict(jacobian_standard(s)); });
  m.def("jacobian_vvl", [](const ManipulatorState& s) { return jacobian_dict(jacobian_vvl(s)); });
  m.def("jacobian_augmented", [](const ManipulatorState& s) { return jacobian_dict(jacobian_augmented(s)); });
  m.def("centerline", &centerline, py::arg("state"), py::arg("samples_per_segment") = 16);

  py::enum_<Method>(m, "Method")
      .value("JACOBIAN", Method::Jacobian)
      .value("DLS", Method::Dls)
      .value("VVL", Method::Vvl);

  py::enum_<FailCause>(m, "FailCause")
      .value("NONE", FailCause::None)
      .value("MAX_ITER", FailCause::MaxIter)
      .value("DEADLOCK", FailCause::Deadlock)
      .value("LOG_BRANCH", FailCause::LogBranch);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("method", &SolverOptions::method)
      .def_readwrite("beta", &SolverOptions::beta)
      .def_readwrite("lambda_", &SolverOptions::lambda)
      .def_readwrite("tol", &SolverOptions::tol)
      .def_readwrite("max_iter", &SolverOptions::max_iter)
      .def_readwrite("vvl_initial_length_factor", &SolverOptions::vvl_initial_length_factor)
      .def_readwrite("record_trajectory", &SolverOptions::record_trajectory)
      .def_readwrite("length_floor_fraction", &SolverOptions::length_floor_fraction)
      .def("validate", &SolverOptions::validate);

  py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("iteration", &TrajectoryPoint::iteration)
      .def_readonly("state", &TrajectoryPoint::state)
      .def_readonly("error", &TrajectoryPoint::error);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("final_error", &SolveResult::final_error)
      .def_readonly("final_state", &SolveResult::final_state)
      .def_readonly("deadlock_flags", &SolveResult::deadlock_flags)
      .def_readonly("fail_cause", &SolveResult::fail_cause)
      .def_readonly("trajectory", &SolveResult::trajectory)
      .def("any_deadlock", &SolveResult::any_deadlock);

  m.def("pose_error_twist", &pose_error_twist, py::arg("current"), py::arg("target"));
  m.def("detect_deadlock", &detect_deadlock);
  m.def(
      "make_initial_guess",
      [](const std::vector<double>& nominal, const SolverOptions& opts) {
        return make_initial_guess(nominal.size(), nominal, opts);
      },
      py::arg("nominal_lengths"), py::arg("options") = SolverOptions{});
  m.def("solve", &solve, py::arg("initial"), py::arg("target"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_from_rest",
      [](const ManipulatorState& target, const SolverOptions& opts) {
        return solve(make_initial_guess(target.size(), nominal_of(target), opts), forward_kinematics(target), opts);
      },
      py::arg("target"), py::arg("options") = SolverOptions{});

  auto b = m.def_submodule("bench", "Randomised benchmark harness");
  py::class_<bench::BenchmarkSpec>(b, "BenchmarkSpec")
      .def(py::init<>())
      .def_static("desk_scale", &bench::BenchmarkSpec::desk_scale)
      .def_readwrite("segment_counts", &bench::BenchmarkSpec::segment_counts)
      .def_readwrite("trials_per_config", &bench::BenchmarkSpec::trials_per_config)
      .def_readwrite("iteration_limits", &bench::BenchmarkSpec::iteration_limits)
      .def_readwrite("tolerances", &bench::BenchmarkSpec::tolerances)
      .def_readwrite("methods", &bench::BenchmarkSpec::methods)
      .def_readwrite("theta_max", &bench::BenchmarkSpec::theta_max)
      .def_readwrite("master_seed", &bench::BenchmarkSpec::master_seed)
      .def_readwrite("nominal_length", &bench::BenchmarkSpec::nominal_length)
      .def_readwrite("solver", &bench::BenchmarkSpec::solver)
      .def("validate", &bench::BenchmarkSpec::validate)
      .def("trial_count", &bench::BenchmarkSpec::trial_count);

  py::class_<bench::TrialRecord>(b, "TrialRecord")
      .def_readonly("trial_id", &bench::TrialRecord::trial_id)
      .def_readonly("trial_index", &bench::TrialRecord::trial_index)
      .def_readonly("method", &bench::TrialRecord::method)
      .def_readonly("n_segments", &bench::TrialRecord::n_segments)
      .def_readonly("iter_limit", &bench::TrialRecord::iter_limit)
      .def_readonly("tolerance", &bench::TrialRecord::tolerance)
      .def_readonly("seed", &bench::TrialRecord::seed)
      .def_readonly("target_kappa", &bench::TrialRecord::target_kappa)
      .def_readonly("target_phi", &bench::TrialRecord::target_phi)
      .def_readonly("target_tip", &bench::TrialRecord::target_tip)
      .def_readonly("converged", &bench::TrialRecord::converged)
      .def_readonly("iterations", &bench::TrialRecord::iterations)
      .def_readonly("final_error", &bench::TrialRecord::final_error)
      .def_readonly("deadlock_any", &bench::TrialRecord::deadlock_any)
      .def_readonly("fail_cause", &bench::TrialRecord::fail_cause)
      .def_readonly("wall_time_us", &bench::TrialRecord::wall_time_us);

  py::class_<bench::SummaryCell>(b, "SummaryCell")
      .def_readonly("method", &bench::SummaryCell::method)
      .def_readonly("n_segments", &bench::SummaryCell::n_segments)
      .def_readonly("iter_limit", &bench::SummaryCell::iter_limit)
      .def_readonly("tolerance", &bench::SummaryCell::tolerance)
      .def_readonly("trial_count", &bench::SummaryCell::trial_count)
      .def_readonly("converged_count", &bench::SummaryCell::converged_count)
      .def_readonly("success_rate", &bench::SummaryCell::success_rate)
      .def_readonly("mean_iter_converged", &bench::SummaryCell::mean_iter_converged)
      .def_readonly("mean_iter_paired", &bench::SummaryCell::mean_iter_paired)
      .def_readonly("deadlock_rate", &bench::SummaryCell::deadlock_rate)
      .def_readonly("empty", &bench::SummaryCell::empty);

  b.def("run_suite", &bench::run_suite, py::arg("spec"), py::arg("workers") = 0u,
        py::call_guard<py::gil_scoped_release>());
  b.def("aggregate", [](const std::vector<bench::TrialRecord>& r) { return bench::aggregate(r).cells; });
  b.def("aggregate_spec", [](const std::vector<bench::TrialRecord>& r, const bench::BenchmarkSpec& s) {
    return bench::aggregate(r, s).cells;
  });

  m.def("demo_target", &cli::demo_target);
  m.def("demo_adverse_start", &cli::demo_adverse_start);
}
