"""Ising / Max-Cut problem representation, exact energies and the Gset reader.

Conventions used throughout the package:

* spins are ``int8`` arrays with entries in {-1, +1}; indices are 0-based;
* the Ising energy is the full double sum ``E = sigma^T J sigma`` (every
  coupling is counted twice, once per ordered pair);
* a Max-Cut instance maps to ``J[i, j] = J[j, i] = w`` so that
  ``cut = (2 * total_weight - E) / 4``.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

MAX_ORACLE_SPINS = 24


class GsetParseError(ValueError):
    """Raised for malformed Gset text; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(ValueError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class IsingModel:
    """Zero-field Ising model ``E = sigma^T J sigma``.

    ``J`` must be symmetric with a zero diagonal and ``h`` must be all zero;
    the incremental energy identity relies on both.
    """

    J: np.ndarray
    h: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        J = np.array(self.J, dtype=np.float64, copy=True)
        if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] < 1:
            raise ValueError(f"J must be a non-empty square matrix, got shape {J.shape}")
        if not np.array_equal(J, J.T):
            raise ValueError("J must be exactly symmetric")
        if np.any(np.diag(J) != 0):
            raise ValueError("J must have a zero diagonal")
        if not np.all(np.isfinite(J)):
            raise ValueError("J must be finite")
        n = J.shape[0]
        h = np.zeros(n) if self.h is None else np.array(self.h, dtype=np.float64, copy=True)
        if h.shape != (n,):
            raise ValueError(f"h must have length {n}")
        if np.any(h != 0):
            raise ValueError("non-zero fields are not supported (zero-field models only)")
        object.__setattr__(self, "J", _readonly(np.ascontiguousarray(J)))
        object.__setattr__(self, "h", _readonly(h))

    @property
    def n(self) -> int:
        return self.J.shape[0]

    @property
    def max_abs_weight(self) -> float:
        return float(np.abs(self.J).max())

    @property
    def max_degree(self) -> int:
        return int((self.J != 0).sum(axis=1).max())

    def is_integer_valued(self) -> bool:
        return bool(np.all(self.J == np.round(self.J)))


@dataclass(frozen=True)
class MaxCutInstance:
    """Weighted undirected graph. Edge arrays are 0-based with ``rows < cols``."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    name: str = ""
    total_weight: float = field(init=False)

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError("n must be positive")
        rows = np.asarray(self.rows, dtype=np.int64).copy()
        cols = np.asarray(self.cols, dtype=np.int64).copy()
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if not (rows.shape == cols.shape == w.shape) or rows.ndim != 1:
            raise ValueError("rows, cols and weights must be 1-D arrays of equal length")
        if np.any(rows == cols):
            raise ValueError("self-loops are not allowed")
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        if lo.size and (lo.min() < 0 or hi.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        keys = lo * self.n + hi
        if np.unique(keys).size != keys.size:
            raise ValueError("duplicate edges")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rows", _readonly(lo))
        object.__setattr__(self, "cols", _readonly(hi))
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "total_weight", float(w.sum()))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], name: str = "") -> "MaxCutInstance":
        edges = list(edges)
        if not edges:
            return cls(n, np.zeros(0, int), np.zeros(0, int), np.zeros(0), name=name)
        i, j, w = zip(*edges)
        return cls(n, np.array(i), np.array(j), np.array(w, dtype=float), name=name)

    @property
    def m(self) -> int:
        return self.rows.size

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()))


def as_spins(spins, n: int | None = None) -> np.ndarray:
    s = np.asarray(spins)
    if s.ndim != 1:
        raise ValueError("spin vector must be one-dimensional")
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("spins must be -1 or +1")
    if n is not None and s.size != n:
        raise ValueError(f"spin vector has length {s.size}, expected {n}")
    return s.astype(np.int8)


def energy_direct(model: IsingModel, spins) -> float:
    """Full O(n^2) evaluation of ``sigma^T J sigma``."""
    s = as_spins(spins, model.n).astype(np.float64)
    return float(s @ (model.J @ s))


def maxcut_to_ising(instance: MaxCutInstance) -> IsingModel:
    J = np.zeros((instance.n, instance.n))
    J[instance.rows, instance.cols] = instance.weights
    J[instance.cols, instance.rows] = instance.weights
    return IsingModel(J, name=instance.name)


def cut_value(instance: MaxCutInstance, spins) -> float:
    s = as_spins(spins, instance.n).astype(np.float64)
    crossing = (1.0 - s[instance.rows] * s[instance.cols]) / 2.0
    return float(np.dot(instance.weights, crossing))


def cut_from_energy(instance: MaxCutInstance, energy: float) -> float:
    return (2.0 * instance.total_weight - energy) / 4.0


def brute_force_ground_state(model: IsingModel, chunk: int = 1 << 15) -> tuple[np.ndarray, float]:
    """Exhaustive minimum of ``sigma^T J sigma`` with ``sigma[0] = +1`` fixed.

    States are visited in lexicographic order (-1 before +1), so the first
    minimum found is the lexicographically smallest minimiser.
    """
    n = model.n
    if n > MAX_ORACLE_SPINS:
        raise CapacityError(f"brute force is capped at {MAX_ORACLE_SPINS} spins, got {n}")
    if n == 1:
        return np.ones(1, dtype=np.int8), 0.0
    free = n - 1
    total = 1 << free
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    best_e = np.inf
    best_idx = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        S = np.empty((idx.size, n))
        S[:, 0] = 1.0
        S[:, 1:] = 2.0 * bits - 1.0
        E = np.einsum("ij,ij->i", S @ model.J, S)
        k = int(np.argmin(E))
        if E[k] < best_e:
            best_e, best_idx = float(E[k]), int(idx[k])
    bits = (best_idx >> shifts) & 1
    state = np.concatenate([[1], 2 * bits - 1]).astype(np.int8)
    return state, energy_direct(model, state)


def random_pm1_model(n: int, rng: np.random.Generator | int | None = None, density: float = 1.0) -> IsingModel:
    """Symmetric model with couplings drawn uniformly from {-1, +1} on a random edge subset."""
    rng = np.random.default_rng(rng)
    W = rng.choice([-1.0, 1.0], size=(n, n))
    if density < 1.0:
        W *= rng.random((n, n)) < density
    W = np.triu(W, 1)
    return IsingModel(W + W.T, name=f"pm1_n{n}")


def random_integer_model(n: int, max_abs: int, rng: np.random.Generator | int | None = None) -> IsingModel:
    rng = np.random.default_rng(rng)
    W = np.triu(rng.integers(-max_abs, max_abs + 1, size=(n, n)).astype(float), 1)
    return IsingModel(W + W.T, name=f"int{max_abs}_n{n}")


def _iter_lines(source) -> tuple[Iterable[str], str]:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("ascii", errors="strict")), ""
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source, "rb") as fh:
            return io.StringIO(fh.read().decode("ascii")), os.path.basename(str(source))
    if isinstance(source, str):
        return io.StringIO(source), ""
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("ascii")
    return io.StringIO(data), getattr(source, "name", "") or ""


def load_gset(source, name: str | None = None) -> MaxCutInstance:
    """Parse a Gset-format graph (``n m`` header, then ``m`` lines ``i j w``, 1-based).

    ``source`` may be bytes, text, an open file or a filesystem path. Lines
    starting with ``#`` or ``%`` and blank lines are ignored.
    """
    lines, default_name = _iter_lines(source)
    header = None
    rows, cols, weights = [], [], []
    seen: dict[tuple[int, int], int] = {}
    n = m = 0
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text[0] in "#%":
            continue
        parts = text.split()
        if header is None:
            if len(parts) != 2:
                raise GsetParseError("header must be 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GsetParseError("header values must be integers", lineno) from None
            if n < 1 or m < 0:
                raise GsetParseError("header requires n >= 1 and m >= 0", lineno)
            header = lineno
            continue
        if len(rows) == m:
            raise GsetParseError(f"more than the declared {m} edge lines", lineno)
        if len(parts) not in (2, 3):
            raise GsetParseError("edge line must be 'i j w'", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GsetParseError("could not parse edge values", lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GsetParseError(f"node index out of range 1..{n}", lineno)
        if i == j:
            raise GsetParseError(f"self-loop on node {i}", lineno)
        key = (min(i, j) - 1, max(i, j) - 1)
        if key in seen:
            raise GsetParseError(f"duplicate edge ({key[0] + 1}, {key[1] + 1}), first seen on line {seen[key]}", lineno)
        seen[key] = lineno
        rows.append(key[0])
        cols.append(key[1])
        weights.append(w)
    if header is None:
        raise GsetParseError("missing 'n m' header", None)
    if len(rows) != m:
        raise GsetParseError(f"expected {m} edges, found {len(rows)}", None)
    return MaxCutInstance(n, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
                          np.array(weights), name=name if name is not None else default_name)


def write_gset(instance: MaxCutInstance) -> str:
    out = [f"{instance.n} {instance.m}"]
    for i, j, w in instance.edges:
        wt = int(w) if float(w).is_integer() else repr(w)
        out.append(f"{i + 1} {j + 1} {wt}")
    return "\n".join(out) + "\n"
