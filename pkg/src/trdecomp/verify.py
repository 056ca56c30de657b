"""Self-contained invariant battery behind the ``verify`` CLI subcommand.

Each check is deterministic and desk-scale (the whole battery runs in
well under a minute); it is a smoke screen, not a substitute for the
test suite.
"""

from __future__ import annotations

import itertools

import numpy as np

from .als import AlsConfig, objective, one_loop, run_als, solve_microstep
from .constructions import exact_fit_cores, rank_witness_cores, spurious_instance
from .ring import (
    GaugeTuple,
    as_generator,
    contract,
    gauge_transform,
    max_abs_last_slice,
    random_cores,
    random_padded_cores,
)
from .tensors import DenseTensor, fnorm, ravel_index, unravel_index
from .unfolding import (
    build_ls_problem,
    full_column_rank,
    reshape_target,
    unfold_core,
    unfold_target,
)

__all__ = ["run_verification_suite"]


def _check_index_roundtrip():
    radixes = (2, 3, 4)
    for tup in itertools.product(*[range(1, r + 1) for r in radixes]):
        if unravel_index(ravel_index(tup, radixes), radixes) != tup:
            return False, f"roundtrip failed at {tup}"
    return True, ""


def _check_planted_instance():
    inst = spurious_instance(3, 2, 5)
    f = objective(inst.target, inst.local_min)
    if f != 0.5:
        return False, f"objective at minimizer is {f!r}"
    if max_abs_last_slice(inst.local_min) != 0.0:
        return False, "minimizer has support on the last slice"
    tau = contract(inst.local_min).array
    if np.any(tau[:, :, 4] != 0.0):
        return False, "contracted minimizer touches the last slice"
    return True, ""


def _check_unfolding_identity():
    rng = as_generator(11)
    u = random_cores(3, 3, (2, 3, 4), rng)
    tau = contract(u)
    scale = 1.0 + fnorm(tau)
    for mode in range(1, 4):
        prob = build_ls_problem(tau, u, mode)
        lhs = prob.a_matrix @ unfold_core(u.cores[mode - 1])
        err = float(np.linalg.norm(lhs - unfold_target(tau, mode)))
        if err > 1e-10 * scale:
            return False, f"identity off by {err:.3e} at mode {mode}"
    return True, ""


def _check_gauge_invariance():
    rng = as_generator(12)
    for _ in range(20):
        u = random_cores(3, 2, 4, rng)
        mats = tuple(np.eye(2) + 0.3 * rng.standard_normal((2, 2)) for _ in range(3))
        try:
            v = gauge_transform(u, GaugeTuple(mats))
        except ValueError:
            continue  # skip the rare near-singular draw
        base = contract(u).values
        err = float(np.linalg.norm(contract(v).values - base))
        if err > 1e-9 * max(1.0, float(np.linalg.norm(base))):
            return False, f"gauge moved the tensor by {err:.3e}"
    return True, ""


def _check_descent():
    rng = as_generator(13)
    for run in range(10):
        target = DenseTensor.from_array(rng.standard_normal((3, 4, 3)))
        u0 = random_cores(3, 2, (3, 4, 3), rng)
        trace = run_als(target, u0, AlsConfig(max_loops=30))
        if trace.descent_violations() != 0:
            return False, f"descent violated in run {run}"
    return True, ""


def _check_fixed_point():
    inst = spurious_instance(3, 2, 5)
    tau0 = contract(inst.local_min).values
    for mode in range(1, 4):
        new_core, _, f_after = solve_microstep(inst.target, inst.local_min, mode)
        moved = contract(inst.local_min.with_core(mode, new_core)).values
        if abs(f_after - 0.5) > 1e-12 or np.linalg.norm(moved - tau0) > 1e-9:
            return False, f"minimizer moved at mode {mode} (f={f_after!r})"
    return True, ""


def _check_witness_identity():
    for d in (3, 4):
        w = rank_witness_cores(d, 2, 4)
        tau = contract(w)
        for j in range(1, d):
            if not np.array_equal(reshape_target(tau, j, 2), np.eye(2**d)):
                return False, f"reshape not identity at d={d}, j={j}"
    return True, ""


def _check_witness_solvability():
    w = random_padded_cores(3, 2, 4, 21)
    u = exact_fit_cores(contract(w), 2)
    target = contract(w)
    fit_err = float(np.linalg.norm(contract(u).values - target.values))
    if fit_err > 1e-10:
        return False, f"exact fit off by {fit_err:.3e}"
    for mode in range(1, 4):
        prob = build_ls_problem(target, u, mode)
        ok, sigma = full_column_rank(prob.a_matrix)
        if not ok:
            return False, f"chain matrix rank-deficient at mode {mode} (sigma={sigma:.3e})"
    return True, ""


def _check_one_loop():
    for m, low in ((9, True), (8, False)):
        for trial in range(2):
            w = random_padded_cores(
                3, 3, 10, np.random.SeedSequence(31, spawn_key=(m, trial))
            )
            start = random_cores(
                3, m, 10, np.random.SeedSequence(32, spawn_key=(m, trial))
            )
            f_after, _ = one_loop(contract(w), start)
            if low and f_after > 1e-6:
                return False, f"wide sweep left objective {f_after:.3e}"
            if not low and f_after < 1.0:
                return False, f"narrow sweep reached objective {f_after:.3e}"
    return True, ""


_CHECKS = [
    ("index-roundtrip", _check_index_roundtrip),
    ("planted-instance", _check_planted_instance),
    ("unfolding-identity", _check_unfolding_identity),
    ("gauge-invariance", _check_gauge_invariance),
    ("monotone-descent", _check_descent),
    ("minimizer-fixed-point", _check_fixed_point),
    ("witness-identity", _check_witness_identity),
    ("witness-solvability", _check_witness_solvability),
    ("one-loop-smoke", _check_one_loop),
]


def run_verification_suite():
    """Run every check; returns a list of (name, passed, detail)."""
    results = []
    for name, fn in _CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
