"""Tensor-ring cores and the ring contraction map.

A ring is a cyclic chain of d third-order cores; core i has shape
(r_i, n_i, r_{i+1}) with the periodic convention r_{d+1} = r_1.
Contracting the chain and closing it with a trace yields a dense d-th
order tensor with external dims (n_1..n_d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensors import DenseTensor

__all__ = [
    "TRCores",
    "GaugeTuple",
    "contract",
    "contract_entry",
    "gauge_transform",
    "max_abs",
    "max_abs_last_slice",
    "random_cores",
    "random_padded_cores",
    "as_generator",
    "dump_cores",
    "load_cores",
]


def as_generator(seed) -> np.random.Generator:
    """Build a deterministic PCG64 generator from a seed-like value.

    Accepts an int, a SeedSequence, or an existing Generator (returned
    as-is). The same seed always yields the same stream on any platform.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True, eq=False)
class TRCores:
    """An ordered tuple of ring cores with cyclically matching bonds."""

    cores: tuple[np.ndarray, ...]

    def __post_init__(self):
        cores = []
        for i, c in enumerate(self.cores):
            arr = np.array(c, dtype=np.float64)
            if arr.ndim != 3:
                raise ValueError(f"core {i + 1} has ndim {arr.ndim}, expected 3")
            arr.setflags(write=False)
            cores.append(arr)
        if len(cores) < 2:
            raise ValueError("a tensor ring needs at least 2 cores")
        for i, c in enumerate(cores):
            nxt = cores[(i + 1) % len(cores)]
            if c.shape[2] != nxt.shape[0]:
                raise ValueError(
                    f"bond mismatch between core {i + 1} (right {c.shape[2]}) "
                    f"and core {(i + 1) % len(cores) + 1} (left {nxt.shape[0]})"
                )
        object.__setattr__(self, "cores", tuple(cores))

    @property
    def order(self) -> int:
        return len(self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        """Internal bond sizes (r_1..r_d), r_i being the left bond of core i."""
        return tuple(c.shape[0] for c in self.cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    def with_core(self, mode: int, core) -> "TRCores":
        """Copy of the ring with the 1-based ``mode``-th core replaced."""
        if not 1 <= mode <= self.order:
            raise ValueError(f"mode {mode} out of range [1, {self.order}]")
        cores = list(self.cores)
        cores[mode - 1] = np.asarray(core, dtype=np.float64)
        return TRCores(tuple(cores))


@dataclass(frozen=True, eq=False)
class GaugeTuple:
    """One square matrix per bond; matrix i acts on bond r_i."""

    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for i, m in enumerate(self.matrices):
            arr = np.array(m, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"gauge matrix {i + 1} is not square: {arr.shape}")
            arr.setflags(write=False)
            mats.append(arr)
        object.__setattr__(self, "matrices", tuple(mats))


def contract(u: TRCores) -> DenseTensor:
    """Evaluate the ring into a dense tensor.

    Contracts left to right, keeping a (r_1, n_1*...*n_j, r_{j+1})
    boundary, then closes the ring with a trace. Cost is polynomial in
    the bond size.
    """
    cores = u.cores
    r1 = cores[0].shape[0]
    acc = cores[0]  # (r_1, n_1, r_2)
    for c in cores[1:]:
        left = acc.reshape(-1, acc.shape[2])
        right = c.reshape(c.shape[0], -1)
        acc = (left @ right).reshape(r1, -1, c.shape[2])
    vals = np.einsum("ini->n", acc)
    return DenseTensor(u.dims, vals)


def contract_entry(u: TRCores, indices) -> float:
    """Single entry of the contracted ring at a 1-based multi-index.

    Equals the trace of the product of the per-mode core slices.
    """
    indices = tuple(int(x) for x in indices)
    if len(indices) != u.order:
        raise ValueError(f"expected {u.order} indices, got {len(indices)}")
    for x, n in zip(indices, u.dims):
        if not 1 <= x <= n:
            raise ValueError(f"index {x} out of range [1, {n}]")
    acc = u.cores[0][:, indices[0] - 1, :]
    for c, x in zip(u.cores[1:], indices[1:]):
        acc = acc @ c[:, x - 1, :]
    return float(np.trace(acc))


def gauge_transform(u: TRCores, gauge: GaugeTuple, tol: float = 1e-10) -> TRCores:
    """Apply the bond-space change of basis v^i(x) = A_i u^i(x) A_{i+1}^{-1}.

    Leaves the contracted tensor unchanged. Raises if any matrix is
    singular at relative tolerance ``tol`` (smallest vs largest singular
    value).
    """
    d = u.order
    if len(gauge.matrices) != d:
        raise ValueError(f"{len(gauge.matrices)} gauge matrices for {d} cores")
    inverses = []
    for i, (mat, r) in enumerate(zip(gauge.matrices, u.ranks)):
        if mat.shape[0] != r:
            raise ValueError(
                f"gauge matrix {i + 1} is {mat.shape[0]}x{mat.shape[0]}, "
                f"bond {i + 1} has size {r}"
            )
        svals = np.linalg.svd(mat, compute_uv=False)
        if svals[-1] <= tol * svals[0]:
            raise ValueError(
                f"gauge matrix {i + 1} is numerically singular "
                f"(sigma_min/sigma_max = {svals[-1] / max(svals[0], 1e-300):.3e})"
            )
        inverses.append(np.linalg.inv(mat))
    new_cores = []
    for i in range(d):
        left = gauge.matrices[i]
        right_inv = inverses[(i + 1) % d]
        new_cores.append(np.einsum("ab,bxc,cd->axd", left, u.cores[i], right_inv))
    return TRCores(tuple(new_cores))


def max_abs(u: TRCores) -> float:
    """Largest absolute entry over all cores."""
    return max(float(np.max(np.abs(c))) if c.size else 0.0 for c in u.cores)


def max_abs_last_slice(u: TRCores) -> float:
    """Largest absolute entry over the last external slice of every core.

    Requires all external dims to be equal; never exceeds max_abs(u).
    """
    dims = u.dims
    if len(set(dims)) != 1:
        raise ValueError(f"external dims {dims} are not uniform")
    n = dims[0]
    return max(float(np.max(np.abs(c[:, n - 1, :]))) for c in u.cores)


def _as_dims(dims, d: int) -> tuple[int, ...]:
    if np.isscalar(dims):
        return (int(dims),) * d
    dims = tuple(int(n) for n in dims)
    if len(dims) != d:
        raise ValueError(f"{len(dims)} dims for order {d}")
    return dims


def random_cores(d: int, rank: int, dims, seed) -> TRCores:
    """Ring of order d and uniform bond size with i.i.d. N(0,1) entries."""
    d, rank = int(d), int(rank)
    if d < 2 or rank < 1:
        raise ValueError(f"need d >= 2 and rank >= 1, got d={d}, rank={rank}")
    dims = _as_dims(dims, d)
    rng = as_generator(seed)
    return TRCores(tuple(rng.standard_normal((rank, n, rank)) for n in dims))


def random_padded_cores(d: int, rank: int, dims, seed) -> TRCores:
    """Gaussian ring whose fibers vanish beyond external position rank**2.

    Contracting such a ring gives a tensor that is zero whenever any
    index exceeds rank**2, so larger external dims are pure zero padding.
    """
    d, rank = int(d), int(rank)
    if d < 2 or rank < 1:
        raise ValueError(f"need d >= 2 and rank >= 1, got d={d}, rank={rank}")
    dims = _as_dims(dims, d)
    support = rank * rank
    if any(n < support for n in dims):
        raise ValueError(f"every dim must be >= rank^2 = {support}, got {dims}")
    rng = as_generator(seed)
    cores = []
    for n in dims:
        c = np.zeros((rank, n, rank))
        c[:, :support, :] = rng.standard_normal((rank, support, rank))
        cores.append(c)
    return TRCores(tuple(cores))


def dump_cores(u: TRCores, path) -> None:
    """Write the ring text format: order, ranks, dims, then core values."""
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(f"{u.order}\n")
        fp.write(" ".join(str(r) for r in u.ranks) + "\n")
        fp.write(" ".join(str(n) for n in u.dims) + "\n")
        for c in u.cores:
            for v in c.reshape(-1):
                fp.write(format(v, ".17g") + "\n")


def load_cores(path) -> TRCores:
    """Read a ring written by :func:`dump_cores`."""
    with open(path, "r", encoding="utf-8") as fp:
        lines = [ln.strip() for ln in fp if ln.strip()]
    try:
        d = int(lines[0])
        ranks = tuple(int(s) for s in lines[1].split())
        dims = tuple(int(s) for s in lines[2].split())
        values = np.array([float(s) for s in lines[3:]])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed cores file {path}: {exc}") from exc
    if len(ranks) != d or len(dims) != d:
        raise ValueError(f"declared order {d} but got {len(ranks)} ranks, {len(dims)} dims")
    shapes = [(ranks[i], dims[i], ranks[(i + 1) % d]) for i in range(d)]
    total = sum(math.prod(s) for s in shapes)
    if values.size != total:
        raise ValueError(f"expected {total} core values, found {values.size}")
    cores = []
    pos = 0
    for shape in shapes:
        size = math.prod(shape)
        cores.append(values[pos : pos + size].reshape(shape))
        pos += size
    return TRCores(tuple(cores))
