"""Behavioural model of the DG-FeFET compute-in-memory crossbar.

Each cell computes ``I_SL = x * G * y * z``: ``x`` is the front-gate (row)
bit, ``y`` the data-line (column) bit, ``G`` the stored bit and ``z`` the
analog back-gate factor. A coupling element ``J[i, j]`` occupies ``k``
adjacent columns (MSB first) of row ``i``. Signed weights use a
differential pair of arrays (``pos`` holds ``max(J, 0)``, ``neg`` holds
``max(-J, 0)``); signed inputs are split into their positive and negative
0/1 parts and evaluated in separate passes.

Column currents are digitised by ADCs shared by mux groups of ``g``
adjacent columns. The ADC least-significant bit tracks the unit-cell
current at the applied back-gate voltage, so an ideal converter returns the
integer count of conducting cells; the unit current is re-applied after the
digital shift-and-add.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property

import numpy as np

from .schedule import ConfigError, FractionalFactor, Schedule


@dataclass
class OpCounters:
    adc_conversions: int = 0
    activated_cells: int = 0
    passes: int = 0
    dac_drives: int = 0
    # sequential ADC slots: per pass, the busiest mux group's conversion count
    adc_cycles: int = 0
    exp_evaluations: int = 0

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

    def __iadd__(self, other: "OpCounters") -> "OpCounters":
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_array(cls, arr) -> "OpCounters":
        return cls(*(int(v) for v in arr))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.int64)


@dataclass(frozen=True)
class QuantizedMatrix:
    k: int
    delta: float
    pos_int: np.ndarray
    neg_int: np.ndarray
    pos_bits: np.ndarray
    neg_bits: np.ndarray

    @property
    def n(self) -> int:
        return self.pos_int.shape[0]

    def reconstructed(self) -> np.ndarray:
        return self.delta * (self.pos_int - self.neg_int).astype(np.float64)


def _bit_slice(mag: np.ndarray, k: int) -> np.ndarray:
    n = mag.shape[0]
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    bits = (mag[:, :, None] >> shifts) & 1
    return bits.reshape(n, n * k).astype(np.uint8)


def quantize_matrix(J, k: int) -> QuantizedMatrix:
    """Sign-split ``k``-bit quantisation with round-half-away-from-zero.

    ``delta = max|J| / (2**k - 1)``, except that integer matrices whose
    magnitudes already fit in ``k`` bits keep ``delta = 1`` (lossless), and
    an all-zero matrix uses ``delta = 1``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    J = np.asarray(J, dtype=np.float64)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("J must be square")
    levels = (1 << k) - 1
    absmax = float(np.abs(J).max()) if J.size else 0.0
    if absmax == 0 or (np.all(J == np.round(J)) and absmax <= levels):
        delta = 1.0
    else:
        delta = absmax / levels
    mag = np.minimum(np.floor(np.abs(J) / delta + 0.5), levels).astype(np.int64)
    pos = np.where(J > 0, mag, 0)
    neg = np.where(J < 0, mag, 0)
    arrays = [pos, neg, _bit_slice(pos, k), _bit_slice(neg, k)]
    for a in arrays:
        a.setflags(write=False)
    return QuantizedMatrix(k, delta, *arrays)


@dataclass(frozen=True)
class CrossbarState:
    qm: QuantizedMatrix
    mux_group: int = 8
    factor: FractionalFactor = field(default_factory=FractionalFactor)
    schedule: Schedule = field(default_factory=Schedule)
    adc_bits: int | None = None

    @property
    def n(self) -> int:
        return self.qm.n

    @property
    def k(self) -> int:
        return self.qm.k

    @property
    def m(self) -> int:
        return self.n * self.k

    @cached_property
    def arrays(self) -> list[tuple[int, np.ndarray]]:
        """Non-empty arrays with their sign, as float copies of the stored bits."""
        out = []
        for sign, bits in ((1, self.qm.pos_bits), (-1, self.qm.neg_bits)):
            if bits.any():
                b = bits.astype(np.float64)
                b.setflags(write=False)
                out.append((sign, b))
        return out

    def unit_current(self, v_bg: float) -> float:
        level = self.schedule.level_for_voltage(v_bg)
        return self.factor(self.schedule.temperature(level))

    def digest(self) -> str:
        h = hashlib.sha256()
        for a in (self.qm.pos_bits, self.qm.neg_bits, self.qm.pos_int, self.qm.neg_int):
            h.update(np.ascontiguousarray(a).tobytes())
        h.update(repr(self.qm.delta).encode())
        return h.hexdigest()


def program_crossbar(qm: QuantizedMatrix, mux_group: int = 8, factor: FractionalFactor | None = None,
                     schedule: Schedule | None = None, adc_bits: int | None = None) -> CrossbarState:
    n = qm.n
    m = n * qm.k
    for name, bits in (("pos", qm.pos_bits), ("neg", qm.neg_bits)):
        if bits.shape != (n, m):
            raise ConfigError(f"{name} array has shape {bits.shape}, expected {(n, m)}")
    if qm.pos_int.shape != (n, n) or qm.neg_int.shape != (n, n):
        raise ConfigError("integer magnitude arrays do not match the crossbar geometry")
    if np.any((qm.pos_int > 0) & (qm.neg_int > 0)):
        raise ConfigError("an element cannot be both positive and negative")
    if mux_group < 1:
        raise ConfigError("mux group size must be >= 1")
    if adc_bits is not None and adc_bits < 1:
        raise ConfigError("adc_bits must be >= 1")
    schedule = schedule or Schedule()
    factor = factor or FractionalFactor.for_schedule(schedule)
    return CrossbarState(qm, int(mux_group), factor, schedule, adc_bits)


def device_current(G: int, x: int, y: int, v_bg: float, factor: FractionalFactor | None = None,
                   schedule: Schedule | None = None) -> float:
    """Normalised source-line current of one cell."""
    schedule = schedule or Schedule()
    if not -1e-12 <= v_bg <= schedule.v_bg_max + 1e-12:
        raise ValueError(f"V_BG={v_bg} outside [0, {schedule.v_bg_max}]")
    if not (G and x and y):
        return 0.0
    factor = factor or FractionalFactor.for_schedule(schedule)
    return factor(schedule.temperature_for_voltage(v_bg))


def _adc(counts: np.ndarray, unit: float, full_scale: int, bits: int | None) -> np.ndarray:
    """Digitise column currents ``counts * unit`` in units of the unit-cell current."""
    if unit == 0:
        return np.zeros(counts.shape)
    currents = counts * unit
    codes = np.round(currents / unit)
    if bits is None:
        return codes
    levels = (1 << bits) - 1
    step = full_scale / levels
    return np.round(codes / step) * step


def _busiest(cols: np.ndarray, g: int) -> int:
    return int(np.bincount(cols // g).max())


def crossbar_e_inc(state: CrossbarState, sigma_r, sigma_c, v_bg: float,
                   normalizer: float) -> tuple[float, OpCounters]:
    """Evaluate ``E_inc`` on the crossbar.

    Rows are driven with a sign part of ``sigma_r``, the columns of the
    flipped elements with a sign part of ``sigma_c``, and every back gate
    with ``v_bg``. Up to 2 x 2 x 2 passes (row sign, column sign, array)
    are executed; passes with empty input support are skipped. Each pass
    converts the ``t * k`` columns of the flipped elements.
    """
    if not normalizer > 0:
        raise ValueError("normalizer must be positive")
    sr = np.asarray(sigma_r)
    sc = np.asarray(sigma_c)
    if sr.shape != (state.n,) or sc.shape != (state.n,):
        raise ValueError(f"input vectors must have length {state.n}")
    unit = state.unit_current(v_bg)
    counters = OpCounters()
    F = np.flatnonzero(sc)
    t = F.size
    if t == 0:
        return 0.0, counters
    k, g = state.k, state.mux_group
    cols = (F[:, None] * k + np.arange(k)).ravel()
    place = np.tile(2.0 ** np.arange(k - 1, -1, -1), t)
    busiest = _busiest(cols, g)
    arrays = state.arrays
    total = 0.0
    for r_sign, r_mask in ((1, sr > 0), (-1, sr < 0)):
        rows = int(r_mask.sum())
        if rows == 0:
            continue
        x = r_mask.astype(np.float64)
        for c_sign, c_mask in ((1, sc > 0), (-1, sc < 0)):
            if not c_mask.any():
                continue
            y = np.repeat(c_mask[F].astype(np.float64), k)
            for a_sign, bits in arrays:
                counts = (x @ bits[:, cols]) * y
                codes = _adc(counts, unit, state.n, state.adc_bits)
                total += r_sign * c_sign * a_sign * float(codes @ place)
                counters.passes += 1
                counters.adc_conversions += t * k
                counters.activated_cells += rows * t * k
                counters.dac_drives += rows + t * k
                counters.adc_cycles += busiest
    return (total * state.qm.delta) / normalizer * unit, counters


def crossbar_energy(state: CrossbarState, spins) -> tuple[float, OpCounters]:
    """Full vector-matrix-vector ``sigma^T J_q sigma`` as a direct-energy annealer computes it.

    Rows are driven with each sign part of ``sigma``, every data line is on
    and every column is converted; the column-side sign is applied digitally.
    The back gate is held at the top of its range (unit factor 1).
    """
    s = np.asarray(spins)
    if s.shape != (state.n,):
        raise ValueError(f"spin vector must have length {state.n}")
    k, n = state.k, state.n
    place = np.tile(2.0 ** np.arange(k - 1, -1, -1), n)
    busiest = min(state.mux_group, state.m)
    counters = OpCounters()
    total = 0.0
    for r_sign, r_mask in ((1, s > 0), (-1, s < 0)):
        rows = int(r_mask.sum())
        if rows == 0:
            continue
        x = r_mask.astype(np.float64)
        for a_sign, bits in state.arrays:
            counts = x @ bits
            codes = _adc(counts, 1.0, n, state.adc_bits)
            per_elem = (codes * place).reshape(n, k).sum(axis=1)
            total += r_sign * a_sign * float(per_elem @ s.astype(np.float64))
            counters.passes += 1
            counters.adc_conversions += state.m
            counters.activated_cells += rows * state.m
            counters.dac_drives += rows + state.m
            counters.adc_cycles += busiest
    return float(total * state.qm.delta), counters


def insitu_counts(state: CrossbarState, sigma_r, sigma_c) -> OpCounters:
    """Counters :func:`crossbar_e_inc` would report, without evaluating currents."""
    sr = np.asarray(sigma_r)
    sc = np.asarray(sigma_c)
    F = np.flatnonzero(sc)
    t = F.size
    out = OpCounters()
    if t == 0:
        return out
    k = state.k
    A = len(state.arrays)
    C = int((sc > 0).any()) + int((sc < 0).any())
    row_parts = [int(v) for v in ((sr > 0).sum(), (sr < 0).sum()) if v]
    passes = len(row_parts) * C * A
    cols = (F[:, None] * k + np.arange(k)).ravel()
    out.passes = passes
    out.adc_conversions = passes * t * k
    out.activated_cells = sum(row_parts) * C * A * t * k
    out.dac_drives = sum(row_parts) * C * A + passes * t * k
    out.adc_cycles = passes * _busiest(cols, state.mux_group)
    return out
