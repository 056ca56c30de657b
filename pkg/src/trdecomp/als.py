"""Alternating least squares for tensor-ring fitting.

Each microstep re-solves one core with the others held fixed; a loop
sweeps the cores in order 1..d. The per-block subproblem is linear, so
the objective can never increase along the sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .ring import TRCores, contract, max_abs
from .tensors import DenseTensor
from .unfolding import _chain_axes, fold_core, unfold_chain, unfold_target

__all__ = [
    "AlsConfig",
    "AlsTrace",
    "objective",
    "solve_microstep",
    "run_als",
    "one_loop",
]


@dataclass(frozen=True)
class AlsConfig:
    """Stopping and solver parameters for one ALS run.

    ``conv_tol`` is an absolute threshold on the per-loop objective
    decrease; ``rank_tol`` is the relative singular-value cutoff of the
    least-squares solver (solutions are minimum-norm past the cutoff).
    """

    max_loops: int = 200
    conv_tol: float = 1e-10
    rank_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.max_loops < 1:
            raise ValueError(f"max_loops must be >= 1, got {self.max_loops}")
        if self.conv_tol < 0 or self.rank_tol < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass
class AlsTrace:
    """Per-microstep record of one ALS run."""

    initial_objective: float
    objectives: list[float] = field(default_factory=list)
    sigma_mins: list[float] = field(default_factory=list)
    max_norms: list[float] = field(default_factory=list)
    loops_run: int = 0
    final_cores: TRCores | None = None

    def descent_violations(self, slack: float = 1e-10) -> int:
        """Count objective increases beyond slack * (1 + previous value)."""
        seq = [self.initial_objective] + list(self.objectives)
        return sum(
            1 for prev, nxt in zip(seq, seq[1:]) if nxt > prev + slack * (1.0 + prev)
        )


def objective(target: DenseTensor, u: TRCores) -> float:
    """Half squared Frobenius distance between the target and the ring."""
    if target.dims != u.dims:
        raise ValueError(f"target dims {target.dims} != ring dims {u.dims}")
    diff = target.values - contract(u).values
    return 0.5 * float(np.dot(diff, diff))


def _lstsq(a: np.ndarray, b: np.ndarray, rank_tol: float):
    """Minimum-norm least-squares solve; returns (x, sigma_min, sigma_max)."""
    x, _, _, svals = np.linalg.lstsq(a, b, rcond=rank_tol)
    if svals.size:
        return x, float(svals[-1]), float(svals[0])
    return x, 0.0, 0.0


def _microstep(b_mat, core_list, mode, rank_tol):
    """Solve one block in-place against a precomputed target unfolding."""
    d = len(core_list)
    chain = [core_list[a] for a in _chain_axes(d, mode)]
    a_mat = unfold_chain(chain)
    x, sigma_min, _ = _lstsq(a_mat, b_mat, rank_tol)
    resid = a_mat @ x - b_mat
    f_after = 0.5 * float(np.dot(resid.reshape(-1), resid.reshape(-1)))
    core_list[mode - 1] = fold_core(x, core_list[mode - 1].shape)
    return sigma_min, f_after


def solve_microstep(
    target: DenseTensor, u: TRCores, mode: int, rank_tol: float = 1e-10
):
    """Optimal replacement for one core with the others fixed.

    Returns (new_core, sigma_min, objective_after). When the unfolded
    chain matrix is rank-deficient at ``rank_tol`` the minimum-norm
    minimizer is returned and sigma_min reflects the deficiency; the
    objective still cannot increase.
    """
    d = u.order
    if target.dims != u.dims:
        raise ValueError(f"target dims {target.dims} != ring dims {u.dims}")
    if not 1 <= mode <= d:
        raise ValueError(f"mode {mode} out of range [1, {d}]")
    core_list = list(u.cores)
    sigma_min, f_after = _microstep(
        unfold_target(target, mode), core_list, mode, rank_tol
    )
    return core_list[mode - 1], sigma_min, f_after


def run_als(target: DenseTensor, u0: TRCores, config: AlsConfig | None = None) -> AlsTrace:
    """Sweep microsteps in mode order 1..d until the objective stalls.

    Stops when the objective decrease over a full loop falls below
    ``conv_tol`` or after ``max_loops`` loops. Rank deficiency of a
    block solve is recorded in the trace, never raised.
    """
    cfg = config or AlsConfig()
    if target.dims != u0.dims:
        raise ValueError(f"target dims {target.dims} != ring dims {u0.dims}")
    d = u0.order
    b_mats = [unfold_target(target, mode) for mode in range(1, d + 1)]
    core_list = list(u0.cores)
    trace = AlsTrace(initial_objective=objective(target, u0))
    f_loop_start = trace.initial_objective
    for _ in range(cfg.max_loops):
        for mode in range(1, d + 1):
            sigma_min, f_after = _microstep(
                b_mats[mode - 1], core_list, mode, cfg.rank_tol
            )
            trace.objectives.append(f_after)
            trace.sigma_mins.append(sigma_min)
        trace.loops_run += 1
        trace.max_norms.append(max_abs(TRCores(tuple(core_list))))
        f_loop_end = trace.objectives[-1]
        if f_loop_start - f_loop_end < cfg.conv_tol:
            break
        f_loop_start = f_loop_end
    trace.final_cores = TRCores(tuple(core_list))
    return trace


def one_loop(target: DenseTensor, u0: TRCores, config: AlsConfig | None = None):
    """Run exactly one loop of d microsteps; returns (objective, trace)."""
    cfg = replace(config or AlsConfig(), max_loops=1, conv_tol=math.inf)
    trace = run_als(target, u0, cfg)
    return trace.objectives[-1], trace
