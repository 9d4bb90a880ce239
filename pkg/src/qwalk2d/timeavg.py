"""
Time-averaged origin probabilities.

Instantaneous occupation probabilities of a coined walk oscillate
forever; their Cesaro averages over time converge and detect
localization.  Four routes to the same quantity are provided:

- `empirical_time_average`: a finite-horizon average along a simulated
  trajectory (any coin, any site), converging at rate O(1/T).
- `exact_time_average`: the exact T -> infinity limit at the origin,
  obtained from the eigenvalue expansion: cross terms between distinct
  eigenvalues average to zero, so only squared moduli of eigenvalue-
  grouped coefficients survive.
- `grover_closed_form`: the polynomial-in-1/N values for the diffusion
  coin started in the pure R state.
- `limit_time_average`: the infinite-lattice limit for an arbitrary
  origin-localized initial state.

Parity-restricted averages (even or odd times only) are supported
throughout.  In the exact route an eigenvalue pair (l, -l) interferes
within a parity class: averaging l^t conj(l')^t over even t survives iff
l' = +-l, so clusters are grouped into +- pairs before squaring,
|A(l) + A(-l)|^2 on even times and |A(l) - A(-l)|^2 on odd times.
"""

from __future__ import annotations

import json
import math
import pathlib
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .coins import CHIRALITIES, Coin, chirality_index
from .evolve import step
from .spectral import (
    DEGENERACY_TOL,
    SpectralDecomposition,
    origin_eigenvalue_amplitudes,
)
from .state import InitialSpec, WalkState

__all__ = [
    "AlphaExtrema",
    "ConsistencyError",
    "IntegralConstants",
    "LocalizationReport",
    "TimeAverageReport",
    "alpha_extrema",
    "empirical_time_average",
    "exact_time_average",
    "grover_closed_form",
    "integral_constants",
    "limit_report",
    "limit_time_average",
    "localization_predictor",
    "scan_alpha",
    "write_report_json",
    "write_scan_csv",
]

PARITIES = ("all", "even", "odd")


class ConsistencyError(RuntimeError):
    """An internal cross-check between independent computations failed."""


@dataclass(frozen=True)
class TimeAverageReport:
    """
    Per-chirality time-averaged probabilities at one site.

    `size` is None for infinite-lattice limits; `samples` is the horizon
    T of an empirical average and None otherwise.
    """

    method: str
    parity: str
    coin: str
    initial: str
    size: int | None
    per_chirality: tuple[float, float, float, float]
    total: float
    samples: int | None = None
    site: tuple[int, int] = (0, 0)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "parity": self.parity,
            "coin": self.coin,
            "N": self.size,
            "initial": self.initial,
            "per_chirality": dict(zip(CHIRALITIES, self.per_chirality)),
            "total": self.total,
            "samples": self.samples,
            "site": list(self.site),
        }


def write_report_json(report: TimeAverageReport, path) -> None:
    pathlib.Path(path).write_text(
        json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
    )


def _check_parity(parity: str) -> str:
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}, got {parity!r}")
    return parity


def _report(method, parity, coin_label, initial_label, size, values,
            samples=None, site=(0, 0)):
    values = np.asarray(values, dtype=float)
    if values.min() < -1e-12 or values.max() > 1.0 + 1e-9:
        raise ConsistencyError(
            f"per-chirality averages left [0, 1]: {values.tolist()}"
        )
    return TimeAverageReport(
        method=method,
        parity=parity,
        coin=coin_label,
        initial=initial_label,
        size=size,
        per_chirality=tuple(float(v) for v in values),
        total=float(values.sum()),
        samples=samples,
        site=(int(site[0]), int(site[1])),
    )


def empirical_time_average(
    initial: WalkState,
    coin: Coin,
    horizon: int,
    site: tuple[int, int] = (0, 0),
    parity: str = "all",
) -> TimeAverageReport:
    """
    Average the per-chirality probabilities at `site` over
    t = 0 ... horizon-1 along a simulated trajectory.

    Parity-restricted averages divide by the number of time points in
    the class (ceil(T/2) even, floor(T/2) odd).
    """
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    _check_parity(parity)
    x, y = site
    ix, iy = initial._site(int(x), int(y))
    acc = np.zeros(4)
    count = 0
    state = initial
    for t in range(horizon):
        if parity == "all" or t % 2 == (0 if parity == "even" else 1):
            acc += np.abs(state.amplitudes[ix, iy]) ** 2
            count += 1
        if t + 1 < horizon:
            state = step(state, coin)
    values = acc / count if count else acc
    return _report(
        "empirical", parity, coin.label, _initial_label(initial), initial.n,
        values, samples=horizon, site=(x, y),
    )


def _initial_label(state: WalkState) -> str:
    weights = state.amplitudes[0, 0]
    if abs(float((np.abs(weights) ** 2).sum()) - 1.0) < 1e-9:
        try:
            return InitialSpec(*weights).describe()
        except ValueError:
            pass
    return "state"


def _parity_pairs(values: np.ndarray, amps: np.ndarray, parity: str) -> np.ndarray:
    used = np.zeros(len(values), dtype=bool)
    sign = 1.0 if parity == "even" else -1.0
    acc = np.zeros(amps.shape[1])
    for i in range(len(values)):
        if used[i]:
            continue
        used[i] = True
        partner = None
        for j in range(len(values)):
            if not used[j] and abs(values[j] + values[i]) <= DEGENERACY_TOL:
                partner = j
                break
        if partner is None:
            acc += np.abs(amps[i]) ** 2
        else:
            used[partner] = True
            acc += np.abs(amps[i] + sign * amps[partner]) ** 2
    return acc


def exact_time_average(
    coin: Coin,
    initial: InitialSpec,
    size: int,
    site: tuple[int, int] = (0, 0),
    parity: str = "all",
) -> TimeAverageReport:
    """
    Exact infinite-horizon time average at the origin via the eigenvalue
    expansion of the origin amplitude.

    Works for any unitary coin; eigenvalue grouping across momentum
    blocks is numeric (tolerance 1e-9).  Only the origin is supported:
    the coefficient algebra assumes an origin-localized initial state.
    """
    _check_parity(parity)
    if tuple(site) != (0, 0):
        raise ValueError("exact averages are available at the origin only")
    merged = origin_eigenvalue_amplitudes(coin, initial, size)
    values = np.array([value for value, _ in merged])
    amps = np.array([amp for _, amp in merged])
    if parity == "all":
        per = (np.abs(amps) ** 2).sum(axis=0)
    else:
        per = _parity_pairs(values, amps, parity)
    return _report("exact", parity, coin.label, initial.describe(), size, per)


def grover_closed_form(size: int, parity: str = "all") -> float:
    """
    Closed-form time-averaged probability of finding the diffusion-coin
    walker back in chirality R at the origin, starting from the pure R
    state on an odd lattice of size N:

        all:  1/8 + 5/(4 N^2) - 2/N^3 + 5/(4 N^4)
        even: 1/4 + 3/(2 N^2) - 2/N^3 + 5/(4 N^4)
        odd:        1/N^2     - 2/N^3 + 5/(4 N^4)

    The three satisfy all = (even + odd)/2 identically, and the all-time
    value decreases monotonically to 1/8 as N grows.
    """
    size = int(size)
    if size < 3 or size % 2 == 0:
        raise ValueError(f"lattice size must be an odd integer >= 3, got {size}")
    _check_parity(parity)
    n2 = size ** 2
    n3 = size ** 3
    n4 = size ** 4
    tail = -2.0 / n3 + 1.25 / n4
    if parity == "all":
        return 0.125 + 1.25 / n2 + tail
    if parity == "even":
        return 0.25 + 1.5 / n2 + tail
    return 1.0 / n2 + tail


# Infinite-lattice limit: the origin amplitude keeps only the +-1
# eigenvalue aggregates, whose lattice sums converge to explicit
# pi-expressions.  The resulting chirality-R value is
# | a/(2 sqrt 2) - sqrt(1/8 + 2/pi^2 - 1/pi) b
#   + sqrt(1/8 + 1/(2 pi^2) - 1/(2 pi)) (g + z) |^2,
# with L, U, D obtained by permuting the weights.
_SELF_COEFF = 1.0 / (2.0 * math.sqrt(2.0))
_OPPOSITE_COEFF = -math.sqrt(0.125 + 2.0 / math.pi ** 2 - 1.0 / math.pi)
_TRANSVERSE_COEFF = math.sqrt(0.125 + 0.5 / math.pi ** 2 - 0.5 / math.pi)

_LIMIT_PERMUTATIONS = {
    0: (0, 1, 2, 3),  # R
    1: (1, 0, 2, 3),  # L
    2: (2, 3, 0, 1),  # U
    3: (3, 2, 0, 1),  # D
}


def limit_time_average(initial: InitialSpec, chirality) -> float:
    """
    Infinite-lattice time-averaged probability of one chirality at the
    origin for an origin-localized initial state.
    """
    idx = chirality_index(chirality)
    w = initial.weights[list(_LIMIT_PERMUTATIONS[idx])]
    amp = _SELF_COEFF * w[0] + _OPPOSITE_COEFF * w[1] + _TRANSVERSE_COEFF * (w[2] + w[3])
    return float(abs(amp) ** 2)


def limit_report(initial: InitialSpec) -> TimeAverageReport:
    """All four chirality limits plus their sum, as a report."""
    values = [limit_time_average(initial, c) for c in range(4)]
    return _report("limit", "all", "grover", initial.describe(), None, values)


AlphaExtrema = namedtuple("AlphaExtrema", ["alpha_min", "alpha_max"])


def alpha_extrema() -> AlphaExtrema:
    """
    Distinguished points of the two-component scan (alpha, sqrt(1-alpha^2)):
    the chirality-R limit vanishes at alpha_min and is maximal at
    magnitude alpha_max (the printed maximum location sits on the
    negative-beta branch; on the scan's beta >= 0 branch the argmax is
    -alpha_max, the same state up to a global phase).
    """
    denom = 16.0 - 8.0 * math.pi + 2.0 * math.pi ** 2
    return AlphaExtrema(
        alpha_min=math.sqrt(1.0 - math.pi ** 2 / denom),
        alpha_max=math.pi / math.sqrt(denom),
    )


def scan_alpha(samples: int) -> np.ndarray:
    """
    Tabulate the chirality-R and chirality-L limits along the family
    (alpha, beta) = (alpha, sqrt(1 - alpha^2)), alpha in [-1, 1].

    Returns an array of rows (alpha, p_R, p_L).
    """
    samples = int(samples)
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    alphas = np.linspace(-1.0, 1.0, samples)
    betas = np.sqrt(np.clip(1.0 - alphas ** 2, 0.0, None))
    amp_r = _SELF_COEFF * alphas + _OPPOSITE_COEFF * betas
    amp_l = _SELF_COEFF * betas + _OPPOSITE_COEFF * alphas
    return np.column_stack([alphas, amp_r ** 2, amp_l ** 2])


def write_scan_csv(path, samples: int) -> None:
    rows = scan_alpha(samples)
    lines = ["alpha,p_R,p_L"]
    lines.extend(f"{a:.17g},{r:.17g},{l:.17g}" for a, r, l in rows)
    pathlib.Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class LocalizationReport:
    """Verdict of the degeneracy-based localization predictor."""

    localizing: bool
    common_eigenvalues: tuple[complex, ...]
    max_multiplicity: int


def localization_predictor(coin: Coin, size: int) -> LocalizationReport:
    """
    Predict localization from the block spectra alone.

    The walk localizes iff some eigenvalue is shared by every momentum
    block: its multiplicity then grows like N^2, so the associated
    origin amplitude survives the infinite-lattice limit.
    """
    decomposition = SpectralDecomposition.build(coin, size)
    common = decomposition.common_eigenvalues()
    return LocalizationReport(
        localizing=bool(common),
        common_eigenvalues=common,
        max_multiplicity=decomposition.max_multiplicity(),
    )


IntegralConstants = namedtuple("IntegralConstants", ["i1", "i2"])

#: Quadrature must reproduce the closed forms at least this well.
_QUADRATURE_TOL = 1e-6


def _integrand_opposite(y: float, x: float) -> float:
    # bounded: numerator and denominator vanish together at the corner
    return (
        2.0
        * (math.cos(x) + math.cos(y) - 2.0 * math.cos(x) * math.cos(y))
        / (-2.0 + math.cos(x) + math.cos(y))
    )


def _integrand_transverse(y: float, x: float) -> float:
    return (
        8.0
        * math.sin(x) ** 2
        * math.sin(y) ** 2
        / (2.0 - math.cos(2.0 * x) - math.cos(2.0 * y))
    )


def integral_constants() -> IntegralConstants:
    """
    The two lattice-sum limits behind the infinite-lattice values:

        i1 = 1/4 - 1/pi       (opposite-chirality coefficient sum)
        i2 = 1/4 - 1/(2 pi)   (transverse-chirality coefficient sum)

    Closed forms are returned; a 2-d quadrature of the defining
    integrands is run as a cross-check.

    Raises
    ------
    ConsistencyError
        If quadrature disagrees with a closed form by more than 1e-6.
    """
    i1 = 0.25 - 1.0 / math.pi
    i2 = 0.25 - 0.5 / math.pi
    eps = 1e-12
    q1, _ = integrate.dblquad(_integrand_opposite, eps, math.pi, eps, math.pi)
    q1 /= 8.0 * math.pi ** 2
    q2, _ = integrate.dblquad(
        _integrand_transverse, eps, math.pi / 2.0, eps, math.pi / 2.0
    )
    q2 /= 2.0 * math.pi ** 2
    if abs(q1 - i1) > _QUADRATURE_TOL or abs(q2 - i2) > _QUADRATURE_TOL:
        raise ConsistencyError(
            f"quadrature check failed: |{q1:.9f} - {i1:.9f}| and "
            f"|{q2:.9f} - {i2:.9f}| must both be below {_QUADRATURE_TOL:g}"
        )
    return IntegralConstants(i1=i1, i2=i2)
