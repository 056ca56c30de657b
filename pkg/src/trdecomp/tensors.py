"""Dense tensors with a fixed lexicographic memory layout.

Entries are stored flat in C order, so the first index is the most
significant one. All public index arguments are 1-based; internal
offsets are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DenseTensor",
    "ravel_index",
    "unravel_index",
    "inner",
    "fnorm",
    "outer",
    "indicator",
    "dump_tensor",
    "load_tensor",
]


def ravel_index(indices, radixes) -> int:
    """Map a 1-based multi-index to its 1-based lexicographic position.

    The first coordinate is most significant: for radixes (m_1..m_d) the
    result is 1 + sum_i (indices[i]-1) * prod_{j>i} m_j.
    """
    indices = tuple(int(i) for i in indices)
    radixes = tuple(int(r) for r in radixes)
    if len(indices) != len(radixes):
        raise ValueError(
            f"index tuple of length {len(indices)} does not match "
            f"{len(radixes)} radixes"
        )
    linear = 0
    for idx, radix in zip(indices, radixes):
        if not 1 <= idx <= radix:
            raise ValueError(f"index {idx} out of range [1, {radix}]")
        linear = linear * radix + (idx - 1)
    return linear + 1


def unravel_index(linear: int, radixes) -> tuple[int, ...]:
    """Inverse of :func:`ravel_index`: 1-based position to 1-based tuple."""
    radixes = tuple(int(r) for r in radixes)
    total = math.prod(radixes)
    linear = int(linear)
    if not 1 <= linear <= total:
        raise ValueError(f"linear index {linear} out of range [1, {total}]")
    rem = linear - 1
    out = []
    for radix in reversed(radixes):
        out.append(rem % radix + 1)
        rem //= radix
    return tuple(reversed(out))


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """A d-th order dense tensor.

    ``dims`` holds the external sizes (n_1..n_d); ``values`` is the flat
    float64 array in lexicographic (C) order. Values are frozen after
    construction so instances can be shared freely.
    """

    dims: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) < 1 or any(n < 1 for n in dims):
            raise ValueError(f"invalid dims {dims}: need order >= 1, sizes >= 1")
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != math.prod(dims):
            raise ValueError(
                f"{values.size} values incompatible with dims {dims} "
                f"(expected {math.prod(dims)})"
            )
        values.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, arr) -> "DenseTensor":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(arr.shape, arr.reshape(-1))

    @classmethod
    def zeros(cls, dims) -> "DenseTensor":
        dims = tuple(int(n) for n in dims)
        return cls(dims, np.zeros(math.prod(dims)))

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def array(self) -> np.ndarray:
        """Read-only view shaped like ``dims``."""
        return self.values.reshape(self.dims)

    def entry(self, indices) -> float:
        """Entry at a 1-based multi-index."""
        return float(self.values[ravel_index(indices, self.dims) - 1])


def inner(x: DenseTensor, y: DenseTensor) -> float:
    """Entrywise inner product of two tensors of identical dims."""
    if x.dims != y.dims:
        raise ValueError(f"dims mismatch: {x.dims} vs {y.dims}")
    return float(np.dot(x.values, y.values))


def fnorm(x: DenseTensor) -> float:
    """Frobenius norm, sqrt(inner(x, x))."""
    return float(np.linalg.norm(x.values))


def outer(x: DenseTensor, y: DenseTensor) -> DenseTensor:
    """Tensor product: dims concatenate, entries multiply."""
    vals = np.multiply.outer(x.array, y.array)
    return DenseTensor(x.dims + y.dims, vals.reshape(-1))


def indicator(j: int, n: int) -> DenseTensor:
    """Length-n unit vector with a one at 1-based position j."""
    j, n = int(j), int(n)
    if not 1 <= j <= n:
        raise ValueError(f"position {j} out of range [1, {n}]")
    vals = np.zeros(n)
    vals[j - 1] = 1.0
    return DenseTensor((n,), vals)


def dump_tensor(t: DenseTensor, path) -> None:
    """Write the fixture text format: order, dims, then one value per line."""
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(f"{t.order}\n")
        fp.write(" ".join(str(n) for n in t.dims) + "\n")
        for v in t.values:
            fp.write(format(v, ".17g") + "\n")


def load_tensor(path) -> DenseTensor:
    """Read a tensor written by :func:`dump_tensor`."""
    with open(path, "r", encoding="utf-8") as fp:
        lines = [ln.strip() for ln in fp if ln.strip()]
    try:
        d = int(lines[0])
        dims = tuple(int(s) for s in lines[1].split())
        values = np.array([float(s) for s in lines[2:]])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed tensor file {path}: {exc}") from exc
    if len(dims) != d:
        raise ValueError(f"declared order {d} but {len(dims)} dims in {path}")
    return DenseTensor(dims, values)
