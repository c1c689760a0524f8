"""Seeded synthetic series with five injected anomaly families.

The clean signal is two sinusoids, a small linear trend and Gaussian noise.
Anomalies are placed without overlap and scaled by the standard deviation of
the clean signal (``sigma0``), so rescaling the input rescales every
injected deviation by the same factor.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BudgetInfeasible, DataShapeError, InvalidParameter
from .labels import Segment, labels_from_segments

logger = logging.getLogger(__name__)

FAMILIES = ("point", "level_shift", "collective", "periodic_disruption", "contextual")
DEFAULT_MIX = {
    "point": 0.025,
    "level_shift": 0.35,
    "collective": 0.25,
    "periodic_disruption": 0.25,
    "contextual": 0.125,
}
# placement order: long events first, points absorb whatever is left
_FILL_ORDER = ("level_shift", "collective", "periodic_disruption", "contextual", "point")


@dataclass(frozen=True)
class SynthDefaults:
    """Every free parameter of the generator in one place."""
    short_period: tuple = (50, 200)
    long_period: tuple = (500, 2000)
    short_amplitude: float = 1.0
    long_amplitude: tuple = (1.5, 2.0)
    trend_total: tuple = (-1.0, 1.0)  # drift across the whole series
    noise_sigma: float = 0.3
    min_gap: int = 5
    point_k: tuple = (3.0, 8.0)
    point_len: tuple = (1, 3)
    shift_short: tuple = (50, 200)
    shift_medium: tuple = (200, 1000)
    shift_long: tuple = (1000, 3000)
    shift_k: tuple = (1.0, 3.0)
    shift_factor_up: tuple = (1.5, 2.5)
    shift_factor_down: tuple = (0.2, 0.5)
    collective_len: tuple = (10, 500)
    collective_period: tuple = (5, 30)
    collective_noise_factor: float = 5.0
    periodic_len: tuple = (50, 1000)
    periodic_amp_factor: float = 0.3
    contextual_len: tuple = (20, 200)
    contextual_amp: tuple = (2.0, 3.0)
    placement_tries: int = 200


DEFAULTS = SynthDefaults()


@dataclass(frozen=True)
class SynthConfig:
    length: int = 5000
    contamination: float = 0.10
    seed: int = 0
    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))

    def __post_init__(self):
        if int(self.length) < 100:
            raise InvalidParameter("length must be >= 100")
        if not 0 < self.contamination < 1:
            raise InvalidParameter("contamination must lie in (0, 1)")
        unknown = set(self.mix) - set(FAMILIES)
        if unknown:
            raise InvalidParameter(f"unknown anomaly families: {sorted(unknown)}")
        if any(v < 0 for v in self.mix.values()):
            raise InvalidParameter("mix proportions must be >= 0")
        if abs(sum(self.mix.values()) - 1.0) > 1e-9:
            raise InvalidParameter("mix proportions must sum to 1")

    def to_dict(self) -> dict:
        return {"length": int(self.length), "contamination": float(self.contamination),
                "seed": int(self.seed), "mix": {k: float(self.mix[k]) for k in sorted(self.mix)}}


class Event(NamedTuple):
    segment: Segment
    family: str
    params: dict


@dataclass
class GeneratedDataset:
    signal: np.ndarray
    labels: np.ndarray
    events: list
    sigma0: float
    config: SynthConfig | None = None
    period: float | None = None


class BaseSignal(NamedTuple):
    signal: np.ndarray
    seasonal: np.ndarray
    trend: np.ndarray
    noise: np.ndarray
    periods: tuple


def generate_base_signal(length: int, seed: int, defaults: SynthDefaults = DEFAULTS,
                         return_components: bool = False):
    """Clean signal: two sinusoids, a linear trend and Gaussian noise."""
    if length < 100:
        raise DataShapeError("length must be >= 100")
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, 0])
    t = np.arange(length, dtype=np.float64)
    p1 = rng.uniform(*defaults.short_period)
    p2 = rng.uniform(*defaults.long_period)
    ph1, ph2 = rng.uniform(0, 2 * np.pi, size=2)
    a2 = rng.uniform(*defaults.long_amplitude)
    seasonal = (defaults.short_amplitude * np.sin(2 * np.pi * t / p1 + ph1)
                + a2 * np.sin(2 * np.pi * t / p2 + ph2))
    trend = rng.uniform(*defaults.trend_total) * t / length
    noise = rng.normal(0.0, defaults.noise_sigma, size=length)
    signal = seasonal + trend + noise
    if return_components:
        return BaseSignal(signal, seasonal, trend, noise, (p1, p2))
    return signal


def estimate_period(x, min_period: int = 10, max_period: int | None = None) -> float:
    """Dominant period from the periodogram of the linearly detrended series."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if max_period is None:
        max_period = n // 2
    t = np.arange(n)
    coef = np.polyfit(t, x, 1)
    r = x - np.polyval(coef, t)
    spec = np.abs(np.fft.rfft(r)) ** 2
    freqs = np.fft.rfftfreq(n)
    with np.errstate(divide="ignore"):
        periods = np.where(freqs > 0, 1.0 / freqs, np.inf)
    ok = (periods >= min_period) & (periods <= max_period)
    if not ok.any():
        return float(min_period)
    idx = np.flatnonzero(ok)[np.argmax(spec[ok])]
    return float(periods[idx])


def _noise_scale(x) -> float:
    """Robust noise std from first differences (MAD / 0.6745 / sqrt 2)."""
    d = np.diff(x)
    mad = np.median(np.abs(d - np.median(d)))
    return float(mad / 0.6745 / np.sqrt(2.0))


def _family_targets(budget: int, mix: dict) -> dict:
    """Integer point budgets per family that sum exactly to ``budget``."""
    out = {}
    cum = 0.0
    prev = 0
    for fam in _FILL_ORDER:
        cum += mix.get(fam, 0.0)
        upto = int(round(cum * budget))
        out[fam] = upto - prev
        prev = upto
    out["point"] += budget - prev
    return out


def _min_len(fam, d: SynthDefaults):
    return {
        "point": d.point_len[0],
        "level_shift": d.shift_short[0],
        "collective": d.collective_len[0],
        "periodic_disruption": d.periodic_len[0],
        "contextual": d.contextual_len[0],
    }[fam]


def _draw_length(fam, avail, rng, d: SynthDefaults):
    if fam == "level_shift":
        classes = [c for c in (d.shift_short, d.shift_medium, d.shift_long) if avail >= c[0]]
        lo, hi = classes[rng.integers(len(classes))]
    else:
        lo, hi = {
            "point": d.point_len,
            "collective": d.collective_len,
            "periodic_disruption": d.periodic_len,
            "contextual": d.contextual_len,
        }[fam]
    hi = min(hi, avail)
    L = int(rng.integers(lo, hi + 1))
    # absorb a tail too small for another event of this family
    rest = avail - L
    if 0 < rest < lo and L + rest <= max(hi, lo):
        L += rest
    return L


class _Placer:
    """Non-overlapping placement with a minimum normal gap between events."""

    def __init__(self, length, gap, tries):
        self.length = length
        self.gap = gap
        self.tries = tries
        self.blocked = np.zeros(length, dtype=bool)

    def _free(self, s, L):
        lo = max(0, s - self.gap)
        hi = min(self.length, s + L + self.gap)
        return not self.blocked[lo:hi].any()

    def place(self, L, rng):
        if L > self.length:
            return None
        for _ in range(self.tries):
            s = int(rng.integers(0, self.length - L + 1))
            if self._free(s, L):
                self._block(s, L)
                return s
        # exact fallback: enumerate every admissible start
        grown = np.convolve(self.blocked.astype(np.int8), np.ones(2 * self.gap + 1, np.int8), "same") > 0
        c = np.concatenate(([0], np.cumsum(grown)))
        starts = np.arange(0, self.length - L + 1)
        ok = (c[starts + L] - c[starts]) == 0
        cand = starts[ok]
        if cand.size == 0:
            return None
        s = int(cand[rng.integers(cand.size)])
        self._block(s, L)
        return s

    def _block(self, s, L):
        self.blocked[s:s + L] = True


def _apply(fam, x, clean, s, e, sigma0, rng, d: SynthDefaults, period, noise_sd):
    seg = slice(s, e + 1)
    L = e - s + 1
    if fam == "point":
        k = float(rng.uniform(*d.point_k))
        sign = float(rng.choice([-1.0, 1.0]))
        x[seg] += sign * k * sigma0
        return {"k": k, "sign": sign}
    if fam == "level_shift":
        if rng.random() < 0.5:
            k = float(rng.uniform(*d.shift_k)) * float(rng.choice([-1.0, 1.0]))
            x[seg] += k * sigma0
            return {"variant": "additive", "k": k}
        rngs = d.shift_factor_up if rng.random() < 0.5 else d.shift_factor_down
        m = float(rng.uniform(*rngs))
        x[seg] *= m
        return {"variant": "multiplicative", "factor": m}
    if fam == "collective":
        v = int(rng.integers(3))
        mu = float(clean[seg].mean())
        if v == 0:
            p = float(rng.uniform(*d.collective_period))
            t = np.arange(L)
            x[seg] = mu + np.sqrt(2.0) * sigma0 * np.sin(2 * np.pi * t / p)
            return {"variant": "frequency_change", "period": p}
        if v == 1:
            extra = np.sqrt(d.collective_noise_factor ** 2 - 1.0) * noise_sd
            x[seg] += rng.normal(0.0, extra, size=L)
            return {"variant": "noise_amplification", "factor": d.collective_noise_factor}
        x[seg] = mu + rng.laplace(0.0, sigma0, size=L)
        return {"variant": "distribution_swap", "distribution": "laplace"}
    if fam == "periodic_disruption":
        v = int(rng.integers(3))
        mu = float(clean[seg].mean())
        if v == 0:
            x[seg] = mu
            return {"variant": "flatten"}
        if v == 1:
            shift = max(1, int(round(period / 2)))
            src = (np.arange(s, e + 1) + shift) % x.size
            x[seg] = clean[src]
            return {"variant": "phase_shift", "shift": shift}
        x[seg] = mu + d.periodic_amp_factor * (clean[seg] - mu)
        return {"variant": "amplitude_reduction", "factor": d.periodic_amp_factor}
    if fam == "contextual":
        if rng.random() < 0.5:
            n = x.size
            # source window at least one event length away from the target
            cands = np.concatenate((np.arange(0, max(0, s - 2 * L + 1)),
                                    np.arange(e + L + 1, n - L + 1)))
            if cands.size:
                src = int(cands[rng.integers(cands.size)])
                x[seg] = clean[src:src + L]
                return {"variant": "context_swap", "source": src}
        a = float(rng.uniform(*d.contextual_amp))
        mu = float(clean[seg].mean())
        x[seg] = mu + a * (clean[seg] - mu)
        return {"variant": "amplitude_distortion", "factor": a}
    raise InvalidParameter(f"unknown family {fam!r}")


def inject_anomalies(signal, config: SynthConfig, defaults: SynthDefaults = DEFAULTS,
                     period: float | None = None) -> GeneratedDataset:
    """Inject the configured anomaly mix into a clean signal.

    The anomalous-point total equals ``round(contamination * length)``: long
    families are filled first and point anomalies absorb the remainder.
    """
    clean = np.asarray(signal, dtype=np.float64)
    T = clean.size
    if T != config.length:
        raise DataShapeError(f"signal length {T} does not match config length {config.length}")
    sigma0 = float(np.std(clean))
    if not sigma0 > 0:
        raise DataShapeError("clean signal has zero variance")
    if period is None:
        period = estimate_period(clean)
    noise_sd = _noise_scale(clean)
    rng = np.random.default_rng([int(config.seed) & 0xFFFFFFFFFFFFFFFF, 1])
    budget = int(round(config.contamination * T))
    targets = _family_targets(budget, config.mix)
    placer = _Placer(T, defaults.min_gap, defaults.placement_tries)
    x = clean.copy()
    events = []
    carry = 0
    for fam in _FILL_ORDER:
        avail = targets[fam] + carry
        share = config.mix.get(fam, 0.0)
        lo = _min_len(fam, defaults)
        if share > 0 and targets[fam] > 0 and avail < lo:
            raise BudgetInfeasible(
                f"{fam} needs at least {lo} points but only {avail} are available "
                f"(length {T}, contamination {config.contamination})")
        while avail >= lo:
            L = _draw_length(fam, avail, rng, defaults)
            s = placer.place(L, rng)
            if s is None:
                raise BudgetInfeasible(f"no room left to place a {fam} event of length {L}")
            e = s + L - 1
            params = _apply(fam, x, clean, s, e, sigma0, rng, defaults, period, noise_sd)
            events.append(Event(Segment(s, e), fam, params))
            avail -= L
        carry = avail
    if carry:
        raise BudgetInfeasible(f"{carry} anomalous points could not be placed")
    events.sort(key=lambda ev: ev.segment.start)
    labels = labels_from_segments([ev.segment for ev in events], T)
    logger.debug("injected %d events, %d anomalous points", len(events), int(labels.sum()))
    return GeneratedDataset(x, labels, events, sigma0, config, period)


def generate(config: SynthConfig, defaults: SynthDefaults = DEFAULTS) -> GeneratedDataset:
    base = generate_base_signal(config.length, config.seed, defaults, return_components=True)
    return inject_anomalies(base.signal, config, defaults, period=base.periods[1])


def stable_seed(*parts) -> int:
    """64-bit seed from a stable hash of the given values."""
    h = hashlib.blake2b(repr(tuple(parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def grid_expand(lengths, contaminations, repetitions: int, base_seed: int,
                mix: dict | None = None) -> list[SynthConfig]:
    """Cartesian product of the grid axes with a per-cell hashed seed."""
    if not lengths or not contaminations or repetitions < 1:
        raise InvalidParameter("grid axes must be non-empty")
    out = []
    for L in lengths:
        for c in contaminations:
            for r in range(repetitions):
                seed = stable_seed(int(base_seed), int(L), round(float(c), 12), int(r))
                out.append(SynthConfig(int(L), float(c), seed, dict(mix or DEFAULT_MIX)))
    return out
