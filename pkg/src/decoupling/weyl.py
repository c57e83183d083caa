"""Quadratic Weyl sums and their L^p moments.

The central object is

    f(x, y) = sum_{j=1}^{M} e(j x + j^2 y),    e(t) = exp(2 pi i t),

on the torus ``[0,1)^2``.  For a fixed ``y`` the map ``x -> f(x, y)`` is a
trigonometric polynomial of degree ``M``, so a whole row of an equispaced
grid comes out of one inverse FFT.  Grid sizes are tied to the bandwidth,
``X = ox*(2M+1)`` and ``Y = oy*(2M^2+1)``, which makes Riemann sums of
``|f|^p`` exact (to roundoff) for even ``p`` once the oversampling is large
enough; see :func:`grid_is_exact`.

Phases ``j^2 y`` are reduced modulo 1 in integer arithmetic before
exponentiation, and sums are accumulated per fixed-size row chunk with
numpy's pairwise summation and then combined with :func:`math.fsum`, so
results do not depend on anything but the inputs.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence, TextIO, Union

import numpy as np

Exponent = Union[int, float, str, Fraction]

DEFAULT_NODE_BUDGET = 2_000_000_000
_CHUNK_ELEMENTS = 1 << 21
# relative floor added to two-grid differences so exact grids get a nonzero estimate
_ROUNDOFF_FLOOR = 1e-12


class ResourceError(RuntimeError):
    """A computation would exceed its configured size budget."""


def as_exponent(p: Exponent) -> Union[Fraction, float]:
    """Normalize ``p`` to a Fraction, or ``math.inf`` for the sup norm."""
    if isinstance(p, str):
        text = p.strip().lower()
        if text in {"inf", "infinity", "oo"}:
            return math.inf
        return Fraction(text)
    if isinstance(p, float):
        if math.isinf(p):
            if p < 0:
                raise ValueError("p must be positive")
            return math.inf
        return Fraction(p).limit_denominator(10**6)
    return Fraction(p)


def _check_p(p: Exponent) -> Union[Fraction, float]:
    p = as_exponent(p)
    if p < 2:
        raise ValueError(f"moments are only defined here for p >= 2, got {p}")
    return p


def even_half(p: Union[Fraction, float]) -> int | None:
    """``p/2`` when ``p`` is a finite even integer, else None."""
    if isinstance(p, float) or p.denominator != 1 or p.numerator % 2:
        return None
    return p.numerator // 2


@dataclass(frozen=True)
class GridSpec:
    """Oversampling factors of the equispaced torus grid."""

    ox: int = 4
    oy: int = 4

    def __post_init__(self) -> None:
        if self.ox < 2 or self.oy < 2:
            raise ValueError("oversampling factors must be at least 2")

    def nx(self, M: int) -> int:
        return self.ox * (2 * M + 1)

    def ny(self, M: int) -> int:
        return self.oy * (2 * M * M + 1)

    def nodes(self, M: int) -> int:
        return self.nx(M) * self.ny(M)

    def doubled(self) -> "GridSpec":
        return GridSpec(2 * self.ox, 2 * self.oy)


def grid_is_exact(M: int, p: Exponent, grid: GridSpec) -> bool:
    """True when the Riemann sum of ``|f|^p`` on ``grid`` equals the integral.

    ``|f|^{2k}`` has x-frequencies up to ``k(M-1)`` and y-frequencies up to
    ``k(M^2-1)``; no nonzero frequency aliases onto the mean when both grid
    sizes exceed those degrees.
    """
    k = even_half(as_exponent(p))
    if k is None:
        return False
    return grid.nx(M) > k * (M - 1) and grid.ny(M) > k * (M * M - 1)


def exact_grid(M: int, p: Exponent) -> GridSpec:
    """Smallest oversampling (at least 2) giving an exact grid for even ``p``."""
    k = even_half(as_exponent(p))
    if k is None:
        raise ValueError(f"no exact grid for non-even p = {p}")
    ox = max(2, -(-(k * (M - 1) + 1) // (2 * M + 1)))
    oy = max(2, -(-(k * (M * M - 1) + 1) // (2 * M * M + 1)))
    return GridSpec(ox, oy)


def _check_budget(nodes: int, budget: int) -> None:
    if nodes > budget:
        raise ResourceError(f"{nodes} grid nodes exceed the budget of {budget}")


def weyl_rows(M: int, numerators: np.ndarray, denominator: int, nx: int) -> np.ndarray:
    """Rows ``f(a/nx, y)`` for ``y = numerators/denominator``, shape (rows, nx).

    The phase ``j^2 * y`` is reduced modulo 1 exactly before exponentiation.
    """
    j2 = np.arange(1, M + 1, dtype=np.int64) ** 2
    num = np.asarray(numerators, dtype=np.int64)
    phase = np.mod(np.outer(num, j2), denominator).astype(np.float64) / denominator
    coeffs = np.zeros((num.size, nx), dtype=np.complex128)
    coeffs[:, 1 : M + 1] = np.exp(2j * np.pi * phase)
    return np.fft.ifft(coeffs, axis=1) * nx


def _row_chunks(total: int, nx: int) -> Iterator[np.ndarray]:
    step = max(1, _CHUNK_ELEMENTS // nx)
    for start in range(0, total, step):
        yield np.arange(start, min(total, start + step), dtype=np.int64)


def eval_weyl_grid(M: int, grid: GridSpec, budget: int = 50_000_000) -> np.ndarray:
    """Values ``f(a/X, b/Y)`` on the full grid as a ``(Y, X)`` complex array."""
    if M < 1:
        raise ValueError("M must be positive")
    _check_budget(grid.nodes(M), budget)
    nx, ny = grid.nx(M), grid.ny(M)
    return np.concatenate([weyl_rows(M, rows, ny, nx) for rows in _row_chunks(ny, nx)])


def _abs_pow(values: np.ndarray, p: Union[Fraction, float]) -> np.ndarray:
    sq = values.real**2 + values.imag**2
    k = even_half(p)
    if k is not None:
        return sq**k
    return sq ** (float(p) / 2)


def _torus_power_mean(M: int, p: Union[Fraction, float], grid: GridSpec) -> float:
    """Mean of ``|f|^p`` over the grid (maximum of ``|f|`` for ``p = inf``)."""
    nx, ny = grid.nx(M), grid.ny(M)
    partials = []
    for rows in _row_chunks(ny, nx):
        vals = weyl_rows(M, rows, ny, nx)
        if p == math.inf:
            partials.append(float(np.max(np.abs(vals))))
        else:
            partials.append(float(np.sum(_abs_pow(vals, p))))
    if p == math.inf:
        return max(partials)
    return math.fsum(partials) / (nx * ny)


@dataclass(frozen=True)
class MomentSample:
    """One computed norm.  ``value`` is the norm itself (the p-th root).

    ``err`` is ``None`` unless a two-grid estimate was requested.
    """

    kind: str
    M: int
    p: Union[Fraction, float]
    value: float
    err: float | None = None
    exact: bool = False

    @property
    def power(self) -> float:
        """``value**p``, the raw moment (``value`` itself for ``p = inf``)."""
        return self.value if self.p == math.inf else self.value ** float(self.p)


def _norm_from_mean(mean: float, p: Union[Fraction, float]) -> float:
    return mean if p == math.inf else mean ** (1.0 / float(p))


def _two_grid(coarse: float, fine: float) -> float:
    return abs(coarse - fine) + _ROUNDOFF_FLOOR * abs(fine)


def moment_2d(
    M: int,
    p: Exponent,
    grid: GridSpec | None = None,
    *,
    with_error: bool = False,
    budget: int = DEFAULT_NODE_BUDGET,
) -> MomentSample:
    """``||f||_{L^p(T^2)}`` by an equal-weight Riemann sum on ``grid``.

    With ``with_error`` the sum is also taken on the doubled grid; the finer
    value is reported and the difference (plus a tiny roundoff floor) becomes
    ``err``.
    """
    p = _check_p(p)
    if M < 1:
        raise ValueError("M must be positive")
    if grid is None:
        grid = exact_grid(M, p) if even_half(p) is not None else GridSpec()
    _check_budget(grid.nodes(M), budget)
    value = _norm_from_mean(_torus_power_mean(M, p, grid), p)
    err = None
    exact = grid_is_exact(M, p, grid)
    if with_error:
        fine_grid = grid.doubled()
        _check_budget(fine_grid.nodes(M), budget)
        fine = _norm_from_mean(_torus_power_mean(M, p, fine_grid), p)
        err = _two_grid(value, fine)
        value = fine
    return MomentSample("moment_2d", M, p, value, err, exact)


def second_moment_exact(M: int) -> int:
    """``||f||_2^2``: the ``M`` characters are orthonormal."""
    if M < 1:
        raise ValueError("M must be positive")
    return M


def fourth_moment_count(M: int, cap: int = 64) -> int:
    """Number of ``(j1..j4) in [1,M]^4`` with equal sums and equal sums of squares.

    Plain exhaustive enumeration of all ``M^4`` quadruples, vectorized over
    the inner pair.
    """
    if M < 1:
        raise ValueError("M must be positive")
    if M > cap:
        raise ResourceError(f"M = {M} exceeds the enumeration cap {cap}")
    j3, j4 = np.meshgrid(np.arange(1, M + 1), np.arange(1, M + 1), indexing="ij")
    s_in, q_in = (j3 + j4).ravel(), (j3 * j3 + j4 * j4).ravel()
    count = 0
    for j1 in range(1, M + 1):
        for j2 in range(1, M + 1):
            count += int(np.count_nonzero((s_in == j1 + j2) & (q_in == j1 * j1 + j2 * j2)))
    return count


def sixth_moment_count(M: int, cap: int = 40) -> int:
    """``||f||_6^6`` as a sum of squared representation counts of triples."""
    if M > cap:
        raise ResourceError(f"M = {M} exceeds the enumeration cap {cap}")
    reps = Counter(
        (a + b + c, a * a + b * b + c * c) for a, b, c in product(range(1, M + 1), repeat=3)
    )
    return sum(n * n for n in reps.values())


def additive_energy(M: int) -> int:
    """Number of quadruples in ``[1,M]^4`` with ``j1 + j2 = j3 + j4``."""
    counts = Counter(a + b for a in range(1, M + 1) for b in range(1, M + 1))
    return sum(n * n for n in counts.values())


# ---------------------------------------------------------------------------
# One-dimensional profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SPProfile:
    """``S_p(s) = int_{-1}^{1} |sum_j e(j t + j^2 s)|^p dt`` on a periodic grid.

    Nodes are ``s_k = -1 + 2k/n`` for ``k = 0..n-1``; by periodicity the
    reflection ``s -> -s`` maps node ``k`` to node ``(n - k) % n``.
    """

    M: int
    p: Union[Fraction, float]
    xd: np.ndarray
    values: np.ndarray
    nx: int

    def integrate(self, power: int = 1) -> float:
        """Riemann sum of ``int_{-1}^{1} S_p(s)^power ds``."""
        terms = self.values.astype(np.float64) ** power
        return 2.0 * math.fsum(terms) / self.values.size


def profile_size(M: int, p: Exponent, power: int = 1, oversample: int = 2) -> int:
    """Node count making the profile integral of ``S_p^power`` exact for even p.

    For other ``p`` the same bandwidth estimate with ``oversample`` doubled.
    """
    p = as_exponent(p)
    k = even_half(p)
    if k is None:
        k = int(math.ceil(float(p) / 2)) if p != math.inf else 1
        oversample *= 2
    base = 2 * M * M + 1
    need = 2 * power * k * (M * M - 1) + 1
    return max(base, oversample * need // 2 + 1)


def sp_profile(
    M: int,
    p: Exponent,
    xd_size: int | None = None,
    ox: int = 4,
    budget: int = DEFAULT_NODE_BUDGET,
) -> SPProfile:
    """Evaluate ``S_p`` at ``xd_size`` equispaced nodes of ``[-1, 1)``."""
    p = _check_p(p)
    if xd_size is None:
        xd_size = profile_size(M, p)
    if xd_size < 2 * M * M + 1:
        raise ValueError(f"profile needs at least 2M^2+1 = {2 * M * M + 1} nodes")
    if ox < 2:
        raise ValueError("oversampling must be at least 2")
    nx = ox * (2 * M + 1)
    _check_budget(nx * xd_size, budget)
    out = np.empty(xd_size)
    for rows in _row_chunks(xd_size, nx):
        # e(j^2 (-1 + 2k/n)) = e(2 k j^2 / n)
        vals = weyl_rows(M, 2 * rows, xd_size, nx)
        if p == math.inf:
            out[rows] = np.max(np.abs(vals), axis=1)
        else:
            out[rows] = 2.0 * np.sum(_abs_pow(vals, p), axis=1) / nx
    xd = -1.0 + 2.0 * np.arange(xd_size) / xd_size
    return SPProfile(M, p, xd, out, nx)


def dirichlet_moment(M: int, p: Exponent, ox: int = 4) -> float:
    """``int_{-1}^{1} |sum_{j=1}^{M} e(j z)|^p dz`` by an oversampled Riemann sum."""
    p = _check_p(p)
    if p == math.inf:
        return float(M)
    nx = ox * (2 * M + 1)
    row = weyl_rows(M, np.zeros(1, dtype=np.int64), 1, nx)[0]
    return 2.0 * float(np.sum(_abs_pow(row, p))) / nx


def sixth_moment_log_check(
    Ms: Sequence[int], grid: GridSpec | None = None
) -> list[tuple[int, float]]:
    """``(M, ||f||_6^6 / M^3)`` across ``Ms``."""
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise ValueError("Ms must be strictly increasing")
    table = []
    for M in Ms:
        sample = moment_2d(M, 6, grid)
        table.append((M, sample.power / M**3))
    return table


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

MOMENT_CSV_COLUMNS = ("kind", "M", "p_num", "p_den", "value", "err")


def exponent_to_pair(p: Union[Fraction, float]) -> tuple[int, int]:
    """``p`` as ``(num, den)``; infinity is ``(1, 0)``."""
    if p == math.inf:
        return 1, 0
    p = Fraction(p)
    return p.numerator, p.denominator


def pair_to_exponent(num: int, den: int) -> Union[Fraction, float]:
    return math.inf if den == 0 else Fraction(num, den)


def write_moment_csv(samples: Iterable[MomentSample], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(MOMENT_CSV_COLUMNS)
    for s in samples:
        num, den = exponent_to_pair(s.p)
        err = "" if s.err is None else repr(s.err)
        writer.writerow([s.kind, s.M, num, den, repr(s.value), err])


def read_moment_csv(stream: TextIO) -> list[MomentSample]:
    out = []
    for row in csv.DictReader(stream):
        p = pair_to_exponent(int(row["p_num"]), int(row["p_den"]))
        err = float(row["err"]) if row["err"] else None
        out.append(MomentSample(row["kind"], int(row["M"]), p, float(row["value"]), err))
    return out


def moments_to_csv_text(samples: Iterable[MomentSample]) -> str:
    buf = io.StringIO()
    write_moment_csv(samples, buf)
    return buf.getvalue()
