"""Explicit target tensors and rings with known optimization structure.

All builders here produce exact 0/1 (or weight-scaled) entries, so
identity checks against them can be exact in floating point:

* ``spurious_target`` / ``spurious_minimizer`` - a target of small bond
  dimension together with a much wider ring that fits everything except
  one orthogonal corner term, leaving an inescapable objective of 1/2.
* ``generalized_instance`` - the same pair with per-mode positive
  weights and orthonormal frames substituted for the unit vectors.
* ``exact_fit_cores`` - a wide ring reproducing any target supported on
  the leading r^2 positions of modes 1..d-1; its block solves are
  uniquely determined whenever the target's slice matrices are
  independent.
* ``rank_witness_cores`` - a bond-r ring whose contraction makes every
  reshaped slice matrix the identity, certifying that slice
  independence holds generically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ring import TRCores, contract
from .tensors import DenseTensor, ravel_index

__all__ = [
    "SpuriousInstance",
    "spurious_target",
    "spurious_minimizer",
    "spurious_instance",
    "generalized_instance",
    "exact_fit_cores",
    "rank_witness_cores",
]

DEFAULT_BYTE_CAP = 2**31  # 2 GiB


def _pair_index(a: int, b: int, r: int) -> int:
    """1-based lexicographic position of the pair (a, b), a most significant."""
    return (a - 1) * r + b


def _check_params(d: int, r: int, n: int, min_n: int) -> None:
    if d < 3:
        raise ValueError(f"need d >= 3, got {d}")
    if r < 2:
        raise ValueError(f"need r >= 2, got {r}")
    if n < min_n:
        raise ValueError(f"need n >= {min_n} for r = {r}, got {n}")


def _check_byte_cap(d: int, m: int, n: int, max_bytes: int) -> None:
    need = d * m * m * n * 8
    if need > max_bytes:
        raise ValueError(
            f"cores would need {need} bytes ({d} cores of {m}x{n}x{m}); "
            f"cap is {max_bytes}"
        )


def spurious_target(d: int, r: int, n: int) -> DenseTensor:
    """Target tensor with r^d + 1 unit entries.

    The bulk entries sit at multi-indices (pi(k_2,k_1), pi(k_3,k_2),
    ..., pi(k_1,k_d)) for all k in [1,r]^d; one extra entry sits at the
    corner (n,..,n), orthogonal to the rest. Dims beyond r^2 + 1 are
    zero padding.
    """
    d, r, n = int(d), int(r), int(n)
    _check_params(d, r, n, r * r + 1)
    arr = np.zeros((n,) * d)
    for ks in itertools.product(range(1, r + 1), repeat=d):
        idx = tuple(
            _pair_index(ks[(i + 1) % d], ks[i], r) - 1 for i in range(d)
        )
        if arr[idx] != 0.0:
            raise RuntimeError(f"pair-index collision at {idx}")
        arr[idx] = 1.0
    arr[(n - 1,) * d] = 1.0
    return DenseTensor.from_array(arr)


def _delta_core(i: int, d: int, r: int, n: int) -> np.ndarray:
    """Core i (1 <= i <= d-1) of the wide minimizer.

    Bond indices encode (d-1)-tuples over [1,r]; the fiber at row p and
    column q is the unit vector at pi(p_i, q_i) when p and q agree on
    every other coordinate, else zero.
    """
    m = r ** (d - 1)
    core = np.zeros((m, n, m))
    radix = (r,) * (d - 1)
    for p in itertools.product(range(1, r + 1), repeat=d - 1):
        row = ravel_index(p, radix) - 1
        for qi in range(1, r + 1):
            q = p[: i - 1] + (qi,) + p[i:]
            col = ravel_index(q, radix) - 1
            core[row, _pair_index(p[i - 1], qi, r) - 1, col] = 1.0
    return core


def _shift_core(d: int, r: int, n: int) -> np.ndarray:
    """Closing core of the wide minimizer.

    Nonzero only when the column tuple is the row tuple shifted left by
    one; the fiber is then the unit vector at pi(p_1, q_{d-1}).
    """
    m = r ** (d - 1)
    core = np.zeros((m, n, m))
    radix = (r,) * (d - 1)
    for p in itertools.product(range(1, r + 1), repeat=d - 1):
        row = ravel_index(p, radix) - 1
        for q_last in range(1, r + 1):
            q = p[1:] + (q_last,)
            col = ravel_index(q, radix) - 1
            core[row, _pair_index(p[0], q_last, r) - 1, col] = 1.0
    return core


def spurious_minimizer(
    d: int, r: int, n: int, max_bytes: int = DEFAULT_BYTE_CAP
) -> TRCores:
    """The wide ring (bond r^(d-1)) that the target of :func:`spurious_target`
    traps: it reproduces every bulk entry but cannot touch the corner.

    The bond size grows exponentially in d, so allocations are refused
    beyond ``max_bytes``.
    """
    d, r, n = int(d), int(r), int(n)
    _check_params(d, r, n, r * r + 1)
    _check_byte_cap(d, r ** (d - 1), n, max_bytes)
    cores = [_delta_core(i, d, r, n) for i in range(1, d)]
    cores.append(_shift_core(d, r, n))
    return TRCores(tuple(cores))


@dataclass(frozen=True, eq=False)
class SpuriousInstance:
    """A target plus the wide ring it traps, with exact invariants.

    Construction verifies, entry for entry, that the contracted ring
    equals the target minus its corner term and that the fit objective
    is exactly 1/2.
    """

    target: DenseTensor
    local_min: TRCores
    d: int
    r: int
    n: int

    def __post_init__(self):
        if self.target.dims != (self.n,) * self.d:
            raise ValueError("target dims inconsistent with (d, n)")
        if self.local_min.ranks != (self.r ** (self.d - 1),) * self.d:
            raise ValueError("ring bond inconsistent with r^(d-1)")
        fitted = contract(self.local_min).array
        expected = self.target.array.copy()
        expected[(self.n - 1,) * self.d] -= 1.0
        if not np.array_equal(fitted, expected):
            raise ValueError("ring does not reproduce the target bulk exactly")
        resid = self.target.array - fitted
        if 0.5 * float(np.sum(resid * resid)) != 0.5:
            raise ValueError("objective at the minimizer is not exactly 1/2")


def spurious_instance(
    d: int, r: int, n: int, max_bytes: int = DEFAULT_BYTE_CAP
) -> SpuriousInstance:
    """Build and validate the (target, minimizer) pair."""
    return SpuriousInstance(
        target=spurious_target(d, r, n),
        local_min=spurious_minimizer(d, r, n, max_bytes=max_bytes),
        d=int(d),
        r=int(r),
        n=int(n),
    )


def _check_frames(weights, frames, d: int, r: int, n: int):
    rsq = r * r
    if weights is None:
        weights = np.ones((d, rsq + 1))
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (d, rsq + 1):
        raise ValueError(f"weights must have shape ({d}, {rsq + 1}), got {weights.shape}")
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive")
    if frames is None:
        frames = np.zeros((d, rsq + 1, n))
        for k in range(rsq + 1):
            frames[:, k, k] = 1.0
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape != (d, rsq + 1, n):
        raise ValueError(f"frames must have shape ({d}, {rsq + 1}, {n}), got {frames.shape}")
    for i in range(d):
        gram = frames[i] @ frames[i].T
        if np.max(np.abs(gram - np.eye(rsq + 1))) > 1e-10:
            raise ValueError(f"frame for mode {i + 1} is not orthonormal")
    return weights, frames


def generalized_instance(d: int, r: int, n: int, weights=None, frames=None):
    """Weighted, rotated variant of the spurious pair.

    Each unit vector e_k of the base construction is replaced, per mode
    i, by weights[i, k-1] * frames[i, k-1]; the corner term uses index
    r^2 + 1. Frames must be orthonormal per mode and weights positive.
    Defaults reproduce the base construction exactly. Returns
    (target, ring).
    """
    d, r, n = int(d), int(r), int(n)
    _check_params(d, r, n, r * r + 1)
    weights, frames = _check_frames(weights, frames, d, r, n)
    rsq = r * r

    scaled = weights[:, :, None] * frames  # (d, r^2+1, n)
    arr = np.zeros((n,) * d)
    for ks in itertools.product(range(1, r + 1), repeat=d):
        term = np.array([1.0])
        for i in range(d):
            k = _pair_index(ks[(i + 1) % d], ks[i], r)
            term = np.multiply.outer(term, scaled[i, k - 1])
        arr += term[0]
    corner = np.array([1.0])
    for i in range(d):
        corner = np.multiply.outer(corner, scaled[i, rsq])
    arr += corner[0]
    target = DenseTensor.from_array(arr)

    m = r ** (d - 1)
    radix = (r,) * (d - 1)
    cores = []
    for i in range(1, d):
        core = np.zeros((m, n, m))
        for p in itertools.product(range(1, r + 1), repeat=d - 1):
            row = ravel_index(p, radix) - 1
            for qi in range(1, r + 1):
                col = ravel_index(p[: i - 1] + (qi,) + p[i:], radix) - 1
                k = _pair_index(p[i - 1], qi, r)
                core[row, :, col] = scaled[i - 1, k - 1]
        cores.append(core)
    closing = np.zeros((m, n, m))
    for p in itertools.product(range(1, r + 1), repeat=d - 1):
        row = ravel_index(p, radix) - 1
        for q_last in range(1, r + 1):
            col = ravel_index(p[1:] + (q_last,), radix) - 1
            k = _pair_index(p[0], q_last, r)
            closing[row, :, col] = scaled[d - 1, k - 1]
    cores.append(closing)
    return target, TRCores(tuple(cores))


def exact_fit_cores(
    target: DenseTensor, r: int, max_bytes: int = DEFAULT_BYTE_CAP
) -> TRCores:
    """Wide ring (bond r^(d-1)) that reproduces ``target`` exactly.

    Requires the target to vanish wherever an index of modes 1..d-1
    exceeds r^2 (mode d is unconstrained: the closing core copies whole
    mode-d fibers of the target).
    """
    r = int(r)
    d = target.order
    if d < 3:
        raise ValueError(f"need a tensor of order >= 3, got {d}")
    rsq = r * r
    dims = target.dims
    if any(n < rsq for n in dims[: d - 1]):
        raise ValueError(f"modes 1..{d - 1} must have dim >= r^2 = {rsq}, got {dims}")
    arr = target.array
    for axis in range(d - 1):
        sl = [slice(None)] * d
        sl[axis] = slice(rsq, None)
        if np.any(arr[tuple(sl)] != 0.0):
            raise ValueError(
                f"target has support beyond position {rsq} in mode {axis + 1}"
            )
    m = r ** (d - 1)
    _check_byte_cap(d, m, max(dims), max_bytes)
    cores = [_delta_core(i, d, r, dims[i - 1]) for i in range(1, d)]
    closing = np.zeros((m, dims[d - 1], m))
    radix = (r,) * (d - 1)
    for p in itertools.product(range(1, r + 1), repeat=d - 1):
        row = ravel_index(p, radix) - 1
        for q in itertools.product(range(1, r + 1), repeat=d - 1):
            col = ravel_index(q, radix) - 1
            fiber_at = tuple(
                _pair_index(q[t], p[t], r) - 1 for t in range(d - 1)
            )
            closing[row, :, col] = arr[fiber_at + (slice(None),)]
    cores.append(closing)
    return TRCores(tuple(cores))


def rank_witness_cores(d: int, r: int, n: int) -> TRCores:
    """Bond-r ring whose reshaped target certifies slice independence.

    The fiber at bond pair (k_1, k_2) is the unit vector at
    pi(k_2, k_1); the contracted tensor has exactly r^d unit entries
    and :func:`trdecomp.unfolding.reshape_target` of it is the identity
    for every split.
    """
    d, r, n = int(d), int(r), int(n)
    if d < 3:
        raise ValueError(f"need d >= 3, got {d}")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    if n < r * r:
        raise ValueError(f"need n >= r^2 = {r * r}, got {n}")
    core = np.zeros((r, n, r))
    for k1 in range(1, r + 1):
        for k2 in range(1, r + 1):
            core[k1 - 1, _pair_index(k2, k1, r) - 1, k2 - 1] = 1.0
    return TRCores(tuple(core.copy() for _ in range(d)))
