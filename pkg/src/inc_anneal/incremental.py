"""Flip plans and the incremental energy forms.

For a flip set ``F`` applied to ``sigma``::

    sigma_new = sigma * (1 - 2 * sigma_f)
    sigma_c   = sigma_new * sigma_f          # flipped entries only
    sigma_r   = sigma_new * (1 - sigma_f)    # unflipped entries only
    delta_E   = 4 * sigma_r^T J sigma_c
    E_inc     = (sigma_r^T J sigma_c / Z) * f(T)

Only rows outside ``F`` and columns inside ``F`` are touched, so one move
costs ``(n - t) * t`` products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import IsingModel, as_spins


@dataclass(frozen=True)
class FlipPlan:
    flip_set: tuple[int, ...]
    sigma: np.ndarray
    sigma_f: np.ndarray
    sigma_new: np.ndarray
    sigma_c: np.ndarray
    sigma_r: np.ndarray

    @property
    def t(self) -> int:
        return len(self.flip_set)

    @property
    def n(self) -> int:
        return self.sigma.size

    @property
    def flip_indices(self) -> np.ndarray:
        return np.fromiter(self.flip_set, dtype=np.int64, count=len(self.flip_set))


def make_flip_plan(spins, flip_indices) -> FlipPlan:
    sigma = as_spins(spins)
    n = sigma.size
    idx = [int(i) for i in np.atleast_1d(np.asarray(flip_indices)).ravel()]
    if not idx:
        raise ValueError("flip set must not be empty")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate flip indices in {idx}")
    if min(idx) < 0 or max(idx) >= n:
        raise ValueError(f"flip index out of range 0..{n - 1}")
    f = np.zeros(n, dtype=np.int8)
    f[idx] = 1
    new = (sigma * (1 - 2 * f)).astype(np.int8)
    c = (new * f).astype(np.int8)
    r = (new * (1 - f)).astype(np.int8)
    for a in (sigma, f, new, c, r):
        a.setflags(write=False)
    return FlipPlan(tuple(idx), sigma, f, new, c, r)


def incremental_product(J: np.ndarray, plan: FlipPlan) -> float:
    """``sigma_r^T J sigma_c`` using only the columns in F and rows outside F."""
    if J.shape[0] != plan.n:
        raise ValueError(f"plan is for {plan.n} spins, model has {J.shape[0]}")
    cols = plan.flip_indices
    rows = np.flatnonzero(plan.sigma_f == 0)
    if rows.size == 0:
        return 0.0
    block = J[np.ix_(rows, cols)]
    return float(plan.sigma_r[rows].astype(np.float64) @ block @ plan.sigma_c[cols].astype(np.float64))


def delta_e(model: IsingModel, plan: FlipPlan) -> float:
    return 4.0 * incremental_product(model.J, plan)


def e_inc(model: IsingModel, plan: FlipPlan, factor_value: float, normalizer: float) -> float:
    if not normalizer > 0:
        raise ValueError(f"normalizer must be positive, got {normalizer}")
    if factor_value < 0:
        raise ValueError(f"factor value must be non-negative, got {factor_value}")
    return incremental_product(model.J, plan) / normalizer * factor_value


def default_normalizer(model: IsingModel, t: int, policy: str | float = "unit") -> float:
    """Scale ``Z`` dividing ``sigma_r^T J sigma_c`` before comparison with ``r ~ U[0, 1)``.

    ``"unit"``   -> ``t * max|J|``: one unit-weight uphill edge per flipped spin
                   maps to ``f(T)``, so the fractional factor sets the
                   rejection strength directly.
    ``"degree"`` -> ``4 * t * max|J| * max_degree``: bounds ``|4 x / Z| <= 1``.
    A positive number is used as-is.
    """
    if not isinstance(policy, str):
        z = float(policy)
        if not z > 0:
            raise ValueError("explicit normalizer must be positive")
        return z
    w = model.max_abs_weight
    if w == 0:
        return 1.0
    if policy == "unit":
        return t * w
    if policy == "degree":
        return 4.0 * t * w * max(model.max_degree, 1)
    raise ValueError(f"unknown normalizer policy {policy!r}")
