"""Kinematics and inverse kinematics for constant-curvature continuum manipulators."""

from ._core import (
    FailCause,
    LogBranchError,
    ManipulatorState,
    Method,
    Pose,
    SegmentState,
    SolveResult,
    SolverOptions,
    ad_of_twist,
    adjoint_of_pose,
    bench,
    centerline,
    demo_adverse_start,
    demo_target,
    detect_deadlock,
    exp_se3,
    forward_kinematics,
    jacobian_augmented,
    jacobian_standard,
    jacobian_vvl,
    log_se3,
    make_initial_guess,
    partial_twist_kappa,
    partial_twist_length,
    partial_twist_phi,
    pose_error_twist,
    pseudo_inverse,
    segment_twist,
    skew3,
    solve,
    solve_from_rest,
    twist_hat,
    twist_vee,
)

__all__ = [name for name in dir() if not name.startswith("_")]
