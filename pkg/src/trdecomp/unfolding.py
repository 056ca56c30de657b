"""Matrix unfoldings that turn one ALS block update into ordinary least squares.

For a ring u and a mode i, the contracted tensor satisfies

    chain_matrix @ core_matrix == target_matrix

where ``chain_matrix`` unfolds the open chain of the d-1 other cores
(rows: the non-i external indices in cyclic order starting at i+1;
columns: the bond pair (k_{i+1}, k_i), k_{i+1} most significant),
``core_matrix`` unfolds core i (same bond-pair rows, columns x_i), and
``target_matrix`` unfolds the tensor accordingly. Minimizing the
Frobenius mismatch over core i is then a standard least-squares solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ring import TRCores
from .tensors import DenseTensor

__all__ = [
    "LSProblem",
    "unfold_target",
    "unfold_chain",
    "unfold_core",
    "fold_core",
    "build_ls_problem",
    "full_column_rank",
    "reshape_target",
]


@dataclass(frozen=True, eq=False)
class LSProblem:
    """One block update, min_X || a_matrix @ X - b_matrix ||_F, at ``mode``."""

    a_matrix: np.ndarray
    b_matrix: np.ndarray
    mode: int

    def __post_init__(self):
        if self.a_matrix.shape[0] != self.b_matrix.shape[0]:
            raise ValueError(
                f"row mismatch: a has {self.a_matrix.shape[0]} rows, "
                f"b has {self.b_matrix.shape[0]}"
            )


def _chain_axes(d: int, mode: int) -> list[int]:
    """0-based axes in cyclic order mode+1, ..., d, 1, ..., mode-1."""
    a = mode - 1
    return [(a + 1 + t) % d for t in range(d - 1)]


def unfold_target(t: DenseTensor, mode: int) -> np.ndarray:
    """Unfold a tensor for the given 1-based mode.

    Rows enumerate the remaining indices lexicographically in cyclic
    order starting at mode+1; columns are x_mode. Shape is
    (prod_{j != mode} n_j, n_mode).
    """
    d = t.order
    if not 1 <= mode <= d:
        raise ValueError(f"mode {mode} out of range [1, {d}]")
    perm = _chain_axes(d, mode) + [mode - 1]
    arr = t.array.transpose(perm)
    return arr.reshape(-1, t.dims[mode - 1]).copy()


def unfold_chain(chain) -> np.ndarray:
    """Unfold an ordered open chain of third-order cores into a matrix.

    ``chain`` lists the cores adjacent to the solved mode in cyclic
    order (mode+1, ..., mode-1). Entry at row (x_{mode+1}, ..,
    x_{mode-1}) and column (k_{mode+1}, k_mode) is the chain product
    summed over all internal bonds; the column pair is ordered with
    k_{mode+1} most significant. Computed by sequential contraction.
    """
    chain = [np.asarray(c, dtype=np.float64) for c in chain]
    if not chain:
        raise ValueError("empty chain")
    for c in chain:
        if c.ndim != 3:
            raise ValueError(f"chain entries must be third-order, got ndim {c.ndim}")
    for a, b in zip(chain, chain[1:]):
        if a.shape[2] != b.shape[0]:
            raise ValueError(f"chain bond mismatch: {a.shape} then {b.shape}")
    m_start = chain[0].shape[0]
    acc = chain[0]
    for c in chain[1:]:
        left = acc.reshape(-1, acc.shape[2])
        right = c.reshape(c.shape[0], -1)
        acc = (left @ right).reshape(m_start, -1, c.shape[2])
    # (m_start, N, m_end) -> (N, m_start * m_end)
    acc = acc.transpose(1, 0, 2)
    return acc.reshape(acc.shape[0], -1).copy()


def unfold_core(core) -> np.ndarray:
    """Unfold one core (r_i, n_i, r_{i+1}) to a (r_{i+1}*r_i, n_i) matrix.

    Row for bond pair (k_{i+1}, k_i) is (k_{i+1}-1)*r_i + k_i - 1,
    matching the column ordering of :func:`unfold_chain`.
    """
    core = np.asarray(core, dtype=np.float64)
    if core.ndim != 3:
        raise ValueError(f"core must be third-order, got ndim {core.ndim}")
    r_left, n, r_right = core.shape
    return core.transpose(2, 0, 1).reshape(r_right * r_left, n).copy()


def fold_core(mat, shape) -> np.ndarray:
    """Inverse of :func:`unfold_core` for a core of the given shape."""
    r_left, n, r_right = (int(s) for s in shape)
    mat = np.asarray(mat, dtype=np.float64)
    if mat.shape != (r_right * r_left, n):
        raise ValueError(f"matrix shape {mat.shape} incompatible with core shape {shape}")
    return mat.reshape(r_right, r_left, n).transpose(1, 2, 0).copy()


def build_ls_problem(target: DenseTensor, u: TRCores, mode: int) -> LSProblem:
    """Assemble the least-squares pair for one block update."""
    d = u.order
    if target.dims != u.dims:
        raise ValueError(f"target dims {target.dims} != ring dims {u.dims}")
    if not 1 <= mode <= d:
        raise ValueError(f"mode {mode} out of range [1, {d}]")
    chain = [u.cores[a] for a in _chain_axes(d, mode)]
    return LSProblem(unfold_chain(chain), unfold_target(target, mode), mode)


def full_column_rank(a, tol: float = 1e-10) -> tuple[bool, float]:
    """Numerical full-column-rank test.

    Returns (ok, sigma_min) with ok true iff the matrix has at least as
    many rows as columns and sigma_min > tol * sigma_max.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.shape[0] < a.shape[1]:
        return False, 0.0
    svals = np.linalg.svd(a, compute_uv=False)
    sigma_min = float(svals[-1])
    return sigma_min > tol * float(svals[0]), sigma_min


def reshape_target(t: DenseTensor, j: int, r: int) -> np.ndarray:
    """Square reordering of the low-index block of a tensor, for mode split j.

    Restricts every axis to its leading r^2 positions, splits each
    restricted index x_i into the digit pair (p_i, q_i) with
    x_i = (p_i - 1) r + q_i, and rearranges into an r^d-by-r^d matrix:
    rows are (a, p_1..p_{j-1}, q_{j+1}..q_{d-1}, b) where (a, b) are the
    digits of the last axis, columns are (q_1..q_j, p_j..p_{d-1}).
    Full column rank of the result certifies that the corresponding
    column fibers of the tensor block are linearly independent.
    """
    d = t.order
    r = int(r)
    if not 1 <= j <= d - 1:
        raise ValueError(f"j = {j} out of range [1, {d - 1}]")
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    rsq = r * r
    if any(n < rsq for n in t.dims):
        raise ValueError(f"every dim must be >= r^2 = {rsq}, got {t.dims}")
    block = t.array[tuple(slice(0, rsq) for _ in range(d))]
    digits = block.reshape((r,) * (2 * d))
    # axis 2*t holds p_{t+1}, axis 2*t+1 holds q_{t+1}; the last pair is (a, b)
    row_axes = (
        [2 * (d - 1)]
        + [2 * (i - 1) for i in range(1, j)]
        + [2 * (i - 1) + 1 for i in range(j + 1, d)]
        + [2 * d - 1]
    )
    col_axes = [2 * (i - 1) + 1 for i in range(1, j + 1)] + [
        2 * (i - 1) for i in range(j, d)
    ]
    rd = r**d
    return digits.transpose(row_axes + col_axes).reshape(rd, rd).copy()
