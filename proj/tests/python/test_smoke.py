import math

import numpy as np
import pytest

import ccik


def test_straight_forward_kinematics():
    state = ccik.ManipulatorState([ccik.SegmentState(0.0, 0.0, 1.0)] * 3)
    pose = ccik.forward_kinematics(state)
    np.testing.assert_allclose(pose.R, np.eye(3))
    np.testing.assert_allclose(pose.p, [0.0, 0.0, 3.0])


def test_quarter_arc_tip():
    pose = ccik.forward_kinematics(ccik.ManipulatorState([ccik.SegmentState(math.pi / 2, 0.0, 1.0)]))
    np.testing.assert_allclose(pose.p, [2 / math.pi, 0.0, 2 / math.pi], atol=1e-12)


def test_exp_log_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        twist = np.concatenate([axis * rng.uniform(0, math.pi - 0.1), rng.uniform(-2, 2, 3)])
        np.testing.assert_allclose(ccik.log_se3(ccik.exp_se3(twist)), twist, atol=1e-9)


def test_log_branch_error():
    half_turn = ccik.exp_se3(np.array([math.pi, 0, 0, 0, 0, 0]))
    with pytest.raises(ccik.LogBranchError):
        ccik.log_se3(half_turn)


def test_jacobian_shapes_and_labels():
    state = ccik.demo_target()
    std = ccik.jacobian_standard(state)
    vvl = ccik.jacobian_vvl(state)
    aug = ccik.jacobian_augmented(state)
    assert std["entries"].shape == (6, 8)
    assert vvl["entries"].shape == (6, 12)
    assert aug["entries"].shape == (10, 12)
    assert std["columns"][:2] == ["kappa_1", "phi_1"]
    assert vvl["columns"][4] == "phi_1"
    np.testing.assert_array_equal(aug["entries"][6:, 8:], np.eye(4))


def _perturbed(state, index, attr, delta):
    segs = [ccik.SegmentState(s.kappa, s.phi, s.length) for s in state.segments]
    setattr(segs[index], attr, getattr(segs[index], attr) + delta)
    return ccik.forward_kinematics(ccik.ManipulatorState(segs)).matrix()


def test_jacobian_matches_finite_differences():
    state = ccik.demo_target()
    J = ccik.jacobian_standard(state)["entries"]
    T_inv = np.linalg.inv(ccik.forward_kinematics(state).matrix())
    h = 1e-6
    for i in range(len(state)):
        for col, attr in ((2 * i, "kappa"), (2 * i + 1, "phi")):
            dT = (_perturbed(state, i, attr, h) - _perturbed(state, i, attr, -h)) / (2 * h)
            M = dT @ T_inv
            fd = np.array([M[2, 1], M[0, 2], M[1, 0], M[0, 3], M[1, 3], M[2, 3]])
            np.testing.assert_allclose(J[:, col], fd, atol=1e-5)


def test_solve_demo_target():
    opts = ccik.SolverOptions()
    opts.tol = 1e-8
    opts.record_trajectory = True
    result = ccik.solve_from_rest(ccik.demo_target(), opts)
    assert result.converged
    assert result.iterations <= 200
    assert result.final_error <= 1e-8
    assert len(result.trajectory) == result.iterations + 1
    assert result.fail_cause == ccik.FailCause.NONE


def test_adverse_start_deadlocks():
    opts = ccik.SolverOptions()
    opts.tol = 1e-8
    target = ccik.forward_kinematics(ccik.demo_target())
    result = ccik.solve(ccik.demo_adverse_start(), target, opts)
    assert not result.converged
    assert result.any_deadlock()


def test_pseudo_inverse_conditions():
    A = np.random.default_rng(1).normal(size=(6, 8))
    P = ccik.pseudo_inverse(A)
    np.testing.assert_allclose(A @ P @ A, A, atol=1e-9)
    np.testing.assert_allclose(P @ A @ P, P, atol=1e-9)


def test_small_benchmark():
    spec = ccik.bench.BenchmarkSpec.desk_scale()
    spec.methods = [ccik.Method.JACOBIAN, ccik.Method.VVL]
    spec.segment_counts = [2]
    spec.trials_per_config = 8
    records = ccik.bench.run_suite(spec, workers=2)
    assert len(records) == 16
    assert [r.trial_id for r in records] == list(range(16))
    jac, vvl = records[:8], records[8:]
    assert all(a.target_kappa == b.target_kappa for a, b in zip(jac, vvl))
    cells = ccik.bench.aggregate(records)
    assert len(cells) == 2
    for cell in cells:
        assert cell.trial_count == 8
        assert 0.0 <= cell.success_rate <= 1.0


def test_invalid_options_raise():
    opts = ccik.SolverOptions()
    opts.beta = -1.0
    with pytest.raises(ValueError):
        opts.validate()
