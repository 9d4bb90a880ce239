"""
Momentum-space diagonalization of the walk operator.

On the torus the one-step operator is block diagonal over momentum pairs
(n, m) in {0, ..., N-1}^2.  Acting on the chirality amplitudes of the
plane wave w^(n x + m y), w = exp(2 pi i / N), each block is the 4x4
unitary

    H(n, m) = diag(w^-n, w^n, w^-m, w^m) @ A,

where A is the coin.  Eigenvalues of every block lie on the unit circle;
collecting them over all N^2 blocks gives the full 4N^2 spectrum of the
walk.  For the diffusion (grover) coin the whole eigensystem is available
in closed form, and the strong degeneracy of the eigenvalues -1 and +1
(multiplicities N^2 + 2 and N^2) is what produces localization.

Closed-form eigenvector conventions
-----------------------------------
The grover block spectrum is {-1, +1, l3, l4} with
l3/l4 = (-c -+ i sqrt(4 - c^2))/2, c = cos(2 pi n / N) + cos(2 pi m / N);
l3 carries the negative imaginary part.  Eigenvectors split into five
block families under H(n, m) as defined above:

- n == m (diagonal): four fixed vectors built from w^-n; the last two are
  proportional to (0, -1, 0, 1) and (-1, 0, 1, 0).
- n == 0, m > 0: the -1 eigenvector is (1, -1, 0, 0); the rest follow a
  polynomial formula in the eigenvalue with parameter w^-m.
- m == 0, n > 0: the mirror of the previous family under the swap
  (R, L) <-> (U, D), with parameter w^-n.
- n + m == N: four fixed vectors built from w^-n.
- otherwise: a cubic-in-eigenvalue formula with parameters w^-n, w^-m.

Each returned vector is normalized to unit length and paired with the
eigenvalue order of `grover_eigenvalues`.

Within a degenerate eigenvalue the eigenvectors are fixed only up to
unitary mixing, so comparisons against the numeric backend must go
through projectors, never individual vectors.
"""

from __future__ import annotations

import json
import os
import pathlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coins import Coin, grover_coin
from .state import InitialSpec, WalkState

__all__ = [
    "DegeneracyClass",
    "MomentumBlock",
    "OriginExpansion",
    "ClassCoefficients",
    "SpectralDecomposition",
    "SpectralError",
    "a1_eigenvalues",
    "build_block",
    "degeneracy_class",
    "evolve_spectral",
    "grover_eigenvalues",
    "grover_eigenvectors",
    "origin_coefficients",
    "origin_eigenvalue_amplitudes",
]

#: Absolute tolerance in the complex plane for treating eigenvalues as equal.
DEGENERACY_TOL = 1e-9
#: Acceptance bound on ||H v - lambda v|| per eigenpair.
RESIDUAL_TOL = 1e-10

#: Environment variable overriding the worker count for block-parallel work.
THREADS_ENV = "QWALK2D_THREADS"


class SpectralError(RuntimeError):
    """Numeric failure inside the spectral machinery."""


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def momentum_phases(n: int, m: int, size: int) -> np.ndarray:
    """Diagonal phase factors (w^-n, w^n, w^-m, w^m) of block (n, m)."""
    w = np.exp(2j * np.pi / size)
    return np.array([w ** -n, w ** n, w ** -m, w ** m])


def block_matrix(coin: Coin, n: int, m: int, size: int) -> np.ndarray:
    """The 4x4 block H(n, m) = diag(phases) @ coin."""
    return momentum_phases(n, m, size)[:, None] * coin.entries


@dataclass(frozen=True)
class MomentumBlock:
    """
    One momentum block with its numeric eigensystem.

    `eigenvectors` holds unit column vectors paired with `eigenvalues`;
    within each degenerate eigenvalue the columns are orthonormalized.
    """

    n: int
    m: int
    size: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def eigen_groups(self, tol: float = DEGENERACY_TOL):
        """Yield (eigenvalue, column matrix) per distinct eigenvalue."""
        for value, idx in _cluster_indices(self.eigenvalues, tol):
            yield value, self.eigenvectors[:, idx]


def _grouped_eigensystem(h: np.ndarray, tol: float = DEGENERACY_TOL):
    """
    Numeric eigensystem of a normal 4x4 matrix as (value, orthonormal
    columns) groups, one per distinct eigenvalue.
    """
    values, vectors = np.linalg.eig(h)
    groups = []
    for value, idx in _cluster_indices(values, tol):
        q, _ = np.linalg.qr(vectors[:, idx])
        groups.append((value, q))
    return groups


def build_block(coin: Coin, n: int, m: int, size: int) -> MomentumBlock:
    """
    Assemble block (n, m) and diagonalize it numerically.

    Raises
    ------
    SpectralError
        If the eigensolver fails or an eigenpair residual exceeds 1e-10;
        the message carries the block coordinates.
    """
    if not (0 <= n < size and 0 <= m < size):
        raise ValueError(f"momenta must lie in 0..{size - 1}, got ({n}, {m})")
    h = block_matrix(coin, n, m, size)
    try:
        groups = _grouped_eigensystem(h)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigendecomposition failed for block ({n}, {m}): {exc}")
    values = []
    columns = []
    for value, q in groups:
        for k in range(q.shape[1]):
            values.append(value)
            columns.append(q[:, k])
    values = np.array(values)
    vectors = np.column_stack(columns)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    residual = np.abs(h @ vectors - vectors * values[None, :]).max()
    if residual > RESIDUAL_TOL:
        raise SpectralError(
            f"eigenpair residual {residual:.3e} in block ({n}, {m}) exceeds "
            f"{RESIDUAL_TOL:.0e}"
        )
    return MomentumBlock(n, m, size, h, values, vectors)


# ---------------------------------------------------------------------------
# Closed forms for the diffusion coin
# ---------------------------------------------------------------------------

def grover_eigenvalues(n: int, m: int, size: int) -> np.ndarray:
    """
    Closed-form eigenvalues of the grover block (n, m), ordered
    [-1, +1, l3, l4] with Im(l3) <= 0 <= Im(l4).

    For n == m the last two are -w^n and -w^-n; otherwise
    l3/l4 = (-c -+ i sqrt(4 - c^2))/2 with
    c = cos(2 pi n / N) + cos(2 pi m / N).
    """
    if n == m:
        w = np.exp(2j * np.pi / size)
        return np.array([-1.0, 1.0, -(w ** n), -(w ** -n)])
    c = np.cos(2 * np.pi * n / size) + np.cos(2 * np.pi * m / size)
    root = np.sqrt(4.0 - c * c)
    return np.array([-1.0, 1.0, (-c - 1j * root) / 2.0, (-c + 1j * root) / 2.0])


def _axis_vectors(lams: np.ndarray, beta: complex, mirrored: bool) -> list[np.ndarray]:
    """Eigenvectors for blocks with one trivial momentum pair."""
    special = np.array([1.0, -1.0, 0.0, 0.0], dtype=complex)
    vectors = [special]
    for lam in lams[1:]:
        v = np.array(
            [
                lam + beta,
                lam + beta,
                beta * lam + beta,
                2 * lam ** 2 + beta * lam - beta,
            ]
        )
        vectors.append(v)
    if mirrored:
        # swap (R, L) <-> (U, D)
        vectors = [np.concatenate([v[2:], v[:2]]) for v in vectors]
    return vectors


def grover_eigenvectors(n: int, m: int, size: int) -> np.ndarray:
    """
    Closed-form unit eigenvectors of the grover block (n, m) as columns,
    paired with the eigenvalue order of `grover_eigenvalues`.
    """
    w = np.exp(2j * np.pi / size)
    lams = grover_eigenvalues(n, m, size)
    if n == m:
        a = w ** -n
        vectors = [
            np.array([-a, 1.0, -a, 1.0]),
            np.array([a, 1.0, a, 1.0]),
            np.array([0.0, -1.0, 0.0, 1.0], dtype=complex),  # eigenvalue -w^n
            np.array([-1.0, 0.0, 1.0, 0.0], dtype=complex),  # eigenvalue -w^-n
        ]
    elif n == 0:
        vectors = _axis_vectors(lams, w ** -m, mirrored=False)
    elif m == 0:
        vectors = _axis_vectors(lams, w ** -n, mirrored=True)
    elif n + m == size:
        a = w ** -n
        fixed = [
            (-1.0, np.array([1.0, -1.0 / a, -1.0 / a, 1.0])),
            (1.0, np.array([1.0, 1.0 / a, 1.0 / a, 1.0])),
            (-(w ** n), np.array([0.0, -1.0, 1.0, 0.0], dtype=complex)),
            (-(w ** -n), np.array([-1.0, 0.0, 0.0, 1.0], dtype=complex)),
        ]
        vectors = []
        for lam in lams:
            match = min(fixed, key=lambda pair: abs(pair[0] - lam))
            vectors.append(match[1])
    else:
        a = w ** -n
        b = w ** -m
        vectors = []
        for lam in lams:
            vectors.append(
                np.array(
                    [
                        a * a * lam ** 2 + (a + a * a * b) * lam + a * b,
                        lam ** 2 + (a + b) * lam + a * b,
                        a * b * lam ** 2 + (b + a * a * b) * lam + a * b,
                        2 * a * lam ** 3 + (1 + a * a + a * b) * lam ** 2 - a * b,
                    ]
                )
            )
    columns = np.column_stack([v / np.linalg.norm(v) for v in vectors])
    return columns


def a1_eigenvalues(n: int, m: int, size: int) -> np.ndarray:
    """
    Closed-form eigenvalues of the a1 block (n, m):
    +-sqrt(i cos(xi_n) sin(xi_m) +- sqrt(1 - cos^2(xi_n) sin^2(xi_m))),
    xi_j = 2 pi j / N.  All four are unimodular; no value is shared by
    every block, which is why the a1 walk does not localize.
    """
    xn = 2 * np.pi * n / size
    xm = 2 * np.pi * m / size
    sc = np.cos(xn) * np.sin(xm)
    root = np.sqrt(1.0 - sc * sc)
    mu_plus = 1j * sc + root
    mu_minus = 1j * sc - root
    return np.array(
        [
            np.sqrt(mu_plus),
            -np.sqrt(mu_plus),
            np.sqrt(mu_minus),
            -np.sqrt(mu_minus),
        ]
    )


# ---------------------------------------------------------------------------
# Degeneracy classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegeneracyClass:
    """Momentum pairs sharing the nontrivial eigenvalues of a block."""

    representative: tuple[int, int]
    members: tuple[tuple[int, int], ...]
    k: int
    eigenvalue: complex


def _orbit(n: int, m: int, size: int) -> tuple[tuple[int, int], ...]:
    if m == 0:
        members = {(n, 0), (0, n), (size - n, 0), (0, size - n)}
    elif n == m:
        members = {(n, n), (n, size - n)}
    else:
        members = {
            (n, m),
            (n, size - m),
            (size - n, m),
            (size - n, size - m),
            (m, n),
            (m, size - n),
            (size - m, n),
            (size - m, size - n),
        }
    return tuple(sorted(members))


def degeneracy_class(n: int, m: int, size: int, k: int = 3) -> DegeneracyClass:
    """
    The deduplicated orbit of momentum pairs sharing eigenvalue k of
    block (n, m), for the diffusion coin.

    The orbit is determined by equality of cos(xi_n) + cos(xi_m): size 4
    for axis blocks (m == 0), 2 for diagonal blocks (n == m), 8 for a
    generic representative.

    Raises
    ------
    ValueError
        For (0, 0), whose fully degenerate block is handled on its own,
        or for k outside 1..4.
    """
    if not (0 <= n < size and 0 <= m < size):
        raise ValueError(f"momenta must lie in 0..{size - 1}, got ({n}, {m})")
    if n == 0 and m == 0:
        raise ValueError("block (0, 0) forms its own class and has no orbit")
    if k not in (1, 2, 3, 4):
        raise ValueError(f"eigenvalue index k must be 1..4, got {k}")
    if n == 0:
        members = _orbit(m, 0, size)
    else:
        members = _orbit(n, m, size)
    return DegeneracyClass(
        representative=(n, m),
        members=members,
        k=k,
        eigenvalue=complex(grover_eigenvalues(n, m, size)[k - 1]),
    )


# ---------------------------------------------------------------------------
# Eigenvalue clustering across blocks
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self, count: int):
        self.parent = list(range(count))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[rj] = ri


def _cluster_indices(values: np.ndarray, tol: float = DEGENERACY_TOL):
    """
    Group complex values equal within `tol` via union-find, sweeping in
    order of real part so only nearby pairs are compared.

    Returns a list of (mean value, index array), sorted by (re, im).
    """
    values = np.asarray(values)
    count = len(values)
    uf = _UnionFind(count)
    order = np.argsort(values.real, kind="stable")
    for a in range(count):
        i = order[a]
        for b in range(a + 1, count):
            j = order[b]
            if values.real[j] - values.real[i] > tol:
                break
            if abs(values[i] - values[j]) <= tol:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(count):
        groups.setdefault(uf.find(i), []).append(i)
    clusters = []
    for idx in groups.values():
        idx = np.array(idx)
        clusters.append((complex(values[idx].mean()), idx))
    clusters.sort(key=lambda item: (item[0].real, item[0].imag))
    return clusters


@dataclass(frozen=True)
class EigenvalueCluster:
    """A distinct eigenvalue of the full walk operator with its multiplicity."""

    value: complex
    multiplicity: int


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    All N^2 momentum blocks of a coin plus the clustered global spectrum.

    Immutable once built; blocks are independent, so construction may be
    spread over worker threads (QWALK2D_THREADS) without affecting the
    result.
    """

    coin_label: str
    size: int
    blocks: tuple[MomentumBlock, ...]
    clusters: tuple[EigenvalueCluster, ...] = field(repr=False)

    @classmethod
    def build(cls, coin: Coin, size: int) -> "SpectralDecomposition":
        rows = range(size)

        def build_row(n: int) -> list[MomentumBlock]:
            return [build_block(coin, n, m, size) for m in range(size)]

        workers = _thread_count()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_row = list(pool.map(build_row, rows))
        else:
            per_row = [build_row(n) for n in rows]
        blocks = tuple(block for row in per_row for block in row)
        values = np.concatenate([block.eigenvalues for block in blocks])
        clusters = tuple(
            EigenvalueCluster(value, len(idx))
            for value, idx in _cluster_indices(values)
        )
        return cls(coin.label, size, blocks, clusters)

    def block(self, n: int, m: int) -> MomentumBlock:
        return self.blocks[n * self.size + m]

    def common_eigenvalues(self, tol: float = DEGENERACY_TOL) -> tuple[complex, ...]:
        """Eigenvalues present in every momentum block (within tol)."""
        candidates = list(self.blocks[0].eigenvalues)
        common = []
        for value in candidates:
            if all(
                np.abs(block.eigenvalues - value).min() <= tol
                for block in self.blocks
            ):
                common.append(value)
        if not common:
            return ()
        merged = [value for value, _ in _cluster_indices(np.array(common), tol)]
        return tuple(merged)

    def max_multiplicity(self) -> int:
        return max(cluster.multiplicity for cluster in self.clusters)

    def to_payload(self) -> dict:
        ordered = sorted(
            self.clusters,
            key=lambda c: (-c.multiplicity, c.value.real, c.value.imag),
        )
        return {
            "coin": self.coin_label,
            "N": self.size,
            "clusters": [
                {
                    "value": [cluster.value.real, cluster.value.imag],
                    "multiplicity": cluster.multiplicity,
                }
                for cluster in ordered
            ],
        }

    def write_json(self, path) -> None:
        payload = self.to_payload()
        pathlib.Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )


# ---------------------------------------------------------------------------
# Spectral evolution
# ---------------------------------------------------------------------------

def evolve_spectral(initial: WalkState, coin: Coin, t: int) -> WalkState:
    """
    State after t steps, reconstructed from the momentum-space
    eigendecomposition instead of step-by-step evolution.

    The amplitudes are Fourier transformed, each momentum component is
    propagated through its block eigensystem with eigenvalues raised to
    the t-th power, and the result is transformed back.
    """
    t = int(t)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    size = initial.n
    transformed = np.fft.fft2(initial.amplitudes, axes=(0, 1))
    out = np.empty_like(transformed)
    for n in range(size):
        for m in range(size):
            h = block_matrix(coin, n, m, size)
            try:
                values, vectors = np.linalg.eig(h)
            except np.linalg.LinAlgError as exc:
                raise SpectralError(
                    f"eigendecomposition failed for block ({n}, {m}): {exc}"
                )
            coeff = np.linalg.solve(vectors, transformed[n, m])
            out[n, m] = vectors @ (values ** t * coeff)
    amplitudes = np.fft.ifft2(out, axes=(0, 1))
    return WalkState(amplitudes, initial.t + t, validate=False)


# ---------------------------------------------------------------------------
# Origin-amplitude coefficients
# ---------------------------------------------------------------------------

def origin_eigenvalue_amplitudes(
    coin: Coin, initial: InitialSpec, size: int
) -> list[tuple[complex, np.ndarray]]:
    """
    Exact expansion of the origin amplitude over distinct eigenvalues.

    For an origin-localized initial state the amplitude of chirality i at
    the origin is exactly

        psi_i(t) = sum over distinct eigenvalues l of  A_l[i] * l^t,

    where A_l collects (1/N^2) times the eigenspace projections of the
    initial chirality vector over every block containing l.  Returns the
    merged (eigenvalue, A_l) list, sorted by (re, im) of the eigenvalue.
    """
    weights = initial.weights
    values = []
    contributions = []
    for n in range(size):
        for m in range(size):
            h = block_matrix(coin, n, m, size)
            for value, q in _grouped_eigensystem(h):
                values.append(value)
                contributions.append(q @ (q.conj().T @ weights))
    values = np.array(values)
    contributions = np.array(contributions)
    merged = []
    for value, idx in _cluster_indices(values):
        merged.append((value, contributions[idx].sum(axis=0) / size ** 2))
    return merged


@dataclass(frozen=True)
class ClassCoefficients:
    """
    Aggregated origin-expansion coefficient of one eigenvalue class.

    `weights` uses the convention in which the origin amplitude reads
    (1/N^2) [ C(+1) + C(-1) (-1)^t + sum over classes w l^t ], i.e. the
    weight equals N^2 times the bare amplitude coefficient.
    """

    eigenvalue: complex
    weights: np.ndarray
    multiplicity: int
    representative: tuple[int, int] | None = None
    k: int | None = None
    members: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class OriginExpansion:
    """
    Eigenvalue-grouped coefficient table of the origin wavefunction for an
    origin-localized initial state.

    `c_plus` and `c_minus` aggregate the +1 and -1 contributions per
    chirality; `classes` itemizes every class including those aggregated
    into `c_plus`/`c_minus`.  For the diffusion coin the classes follow
    the momentum orbits (labeled by representative and k); for other
    coins they are numeric eigenvalue clusters.
    """

    coin_label: str
    size: int
    initial: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    classes: tuple[ClassCoefficients, ...]
    merged: tuple[tuple[complex, np.ndarray], ...]

    def amplitude(self, t: int) -> np.ndarray:
        """Origin amplitude 4-vector at time t from the expansion."""
        total = np.zeros(4, dtype=np.complex128)
        for value, amp in self.merged:
            total += amp * value ** int(t)
        return total


def _is_grover(coin: Coin) -> bool:
    return bool(np.abs(coin.entries - grover_coin().entries).max() < 1e-12)


def _grover_classes(
    weights: np.ndarray, size: int
) -> list[ClassCoefficients]:
    projectors: dict[tuple[int, int], list[tuple[complex, np.ndarray]]] = {}
    for n in range(size):
        for m in range(size):
            h = block_matrix(grover_coin(), n, m, size)
            projectors[(n, m)] = [
                (value, q @ (q.conj().T @ weights))
                for value, q in _grouped_eigensystem(h)
            ]

    def value_weight(member: tuple[int, int], value: complex) -> np.ndarray:
        for candidate, amp in projectors[member]:
            if abs(candidate - value) <= DEGENERACY_TOL:
                return amp
        raise SpectralError(
            f"block {member} lacks expected eigenvalue {value:.6f}"
        )

    classes: list[ClassCoefficients] = []
    # (0, 0): fully degenerate block, kept as its own one-member class.
    for value, amp in projectors[(0, 0)]:
        multiplicity = 3 if abs(value + 1.0) < DEGENERACY_TOL else 1
        k = 2 if multiplicity == 1 else None
        classes.append(
            ClassCoefficients(value, amp, multiplicity, (0, 0), k, ((0, 0),))
        )
    half = (size - 1) // 2
    representatives = [(n, 0) for n in range(1, half + 1)]
    representatives += [(n, n) for n in range(1, size)]
    representatives += [
        (n, m) for n in range(1, half) for m in range(n + 1, half + 1)
    ]
    for rep in representatives:
        members = _orbit(rep[0], rep[1], size)
        lams = grover_eigenvalues(rep[0], rep[1], size)
        for k, value in enumerate(lams, start=1):
            total = np.zeros(4, dtype=np.complex128)
            for member in members:
                total += value_weight(member, value)
            classes.append(
                ClassCoefficients(
                    complex(value), total, len(members), rep, k, members
                )
            )
    return classes


def origin_coefficients(
    coin: Coin, initial: InitialSpec, size: int
) -> OriginExpansion:
    """
    Coefficient table of the origin wavefunction expansion.

    The reconstruction identity, exact for all t >= 0:

        amplitude(t) = (1/N^2) [ c_plus + c_minus (-1)^t
                                 + sum over other classes w l^t ]

    For the diffusion coin, classes carry their momentum-orbit labels
    (representative pair and eigenvalue index); the aggregated +-1 rows
    reproduce the known closed-form values.
    """
    weights = initial.weights
    merged = origin_eigenvalue_amplitudes(coin, initial, size)
    scale = float(size ** 2)
    c_plus = np.zeros(4, dtype=np.complex128)
    c_minus = np.zeros(4, dtype=np.complex128)
    for value, amp in merged:
        if abs(value - 1.0) <= DEGENERACY_TOL:
            c_plus = amp * scale
        elif abs(value + 1.0) <= DEGENERACY_TOL:
            c_minus = amp * scale
    if _is_grover(coin):
        classes = _grover_classes(weights, size)
    else:
        values = np.concatenate(
            [
                build_block(coin, n, m, size).eigenvalues
                for n in range(size)
                for m in range(size)
            ]
        )
        multiplicities = {
            value: len(idx) for value, idx in _cluster_indices(values)
        }

        def multiplicity_of(value: complex) -> int:
            return min(
                multiplicities.items(), key=lambda kv: abs(kv[0] - value)
            )[1]

        classes = [
            ClassCoefficients(value, amp * scale, multiplicity_of(value))
            for value, amp in merged
        ]
    return OriginExpansion(
        coin_label=coin.label,
        size=size,
        initial=weights,
        c_plus=c_plus,
        c_minus=c_minus,
        classes=tuple(classes),
        merged=tuple(merged),
    )
