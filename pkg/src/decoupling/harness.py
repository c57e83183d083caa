"""Numerical decoupling ratios for the three extremizer families.

For ``delta = M^{-2}`` the caps ``Q`` are the ``N = M^{d-1}`` cubes of side
``1/M`` in ``[0,1]^{d-1}`` and ``B`` is the cube of side ``R = M^2`` centred
at the origin.  The ratio is

    R(g) = ||Eg||_{L^p(B)} / || ||E(g 1_Q)||_{L^p(w_B)} ||_{l^q(Q)}.

Every family is reduced analytically to one-dimensional objects before any
numerics:

* point masses at ``(j_1/M, ..., j_{d-1}/M)`` give products of Weyl sums, so
  ``||Eg||_p^p`` is ``2^{-d} M^{2d} int_{-1}^{1} S_p(s)^{d-1} ds``;
* ``g = 1`` gives ``E1(x) = prod_i F(x_i, v_i x_d)`` with
  ``F(a, b) = int_0^1 e(a xi + b xi^2) dxi``, evaluated in closed form through
  Fresnel integrals;
* masses on the diagonals ``xi_k = xi_{k+dv}`` give Dirichlet-kernel factors
  times an elliptic problem in ``d - 2 dv`` dimensions.

The default weight is the product of one-dimensional box-adapted weights
``(1 + dist(x_i, [-R/2, R/2]) / R)^{-100}``: equal to one on ``B`` and
decaying like ``(1 + |x|/R)^{-100 d}`` along the diagonals.  The radial
weight ``(1 + |x|/R)^{-100 d}`` is still available through
``BoxSpec(profile="radial")`` for the families whose pieces are unimodular.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from scipy import integrate, special

from . import exponents as ex
from .weyl import (
    DEFAULT_NODE_BUDGET,
    ResourceError,
    _abs_pow,
    _check_p,
    as_exponent,
    profile_size,
    sp_profile,
    weyl_rows,
)

Exponent = Union[int, float, str, Fraction]


class ConfigurationError(ValueError):
    """Inconsistent numerical configuration (resolution, truncation, weight)."""


# ---------------------------------------------------------------------------
# Boxes and weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxSpec:
    """Cube of side ``delta^{-1} = M^2`` at the origin and its weight.

    ``truncation`` is a multiple of ``delta^{-1}``: the per-axis half-width
    (product profile) or radius (radial profile) of the integration domain.
    """

    d: int
    M: int
    profile: str = "product"
    weight_exponent: int | None = None
    truncation: float = 3.0
    tail_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.profile not in ("product", "radial"):
            raise ConfigurationError(f"unknown weight profile {self.profile!r}")
        if self.d < 1 or self.M < 1:
            raise ConfigurationError("dimension and M must be positive")
        if self.weight_exponent is None:
            default = 100 if self.profile == "product" else 100 * max(self.d, 1)
            object.__setattr__(self, "weight_exponent", default)
        s = self.weight_exponent
        if (self.profile == "product" and s <= 1) or (self.profile == "radial" and s <= self.d):
            raise ConfigurationError("weight is not integrable")

    @property
    def delta(self) -> float:
        return 1.0 / self.M**2

    @property
    def side(self) -> float:
        return float(self.M**2)

    @property
    def radius(self) -> float:
        return self.truncation * self.side

    def with_dim(self, d: int) -> "BoxSpec":
        return BoxSpec(d, self.M, self.profile, self.weight_exponent if self.profile == "product" else None,
                       self.truncation, self.tail_tol)

    def axis_weight(self, x: np.ndarray) -> np.ndarray:
        """One-dimensional factor of the product weight."""
        R = self.side
        dist = np.maximum(np.abs(x) - R / 2, 0.0)
        return (1.0 + dist / R) ** (-float(self.weight_exponent))

    def weight(self, x: np.ndarray) -> np.ndarray:
        """Weight at points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        if self.profile == "radial":
            r = np.sqrt(np.sum(x * x, axis=-1))
            return (1.0 + r / self.side) ** (-float(self.weight_exponent))
        return np.prod(self.axis_weight(x), axis=-1)

    # tails are closed form; both are fractions of the total weight mass
    def axis_tail_fraction(self, half_width: float) -> float:
        R, s = self.side, float(self.weight_exponent)
        if half_width < R / 2:
            return 1.0
        total = R + 2 * R / (s - 1)
        tail = 2 * R / (s - 1) * (1 + (half_width - R / 2) / R) ** (1 - s)
        return tail / total

    def radial_tail_fraction(self, radius: float) -> float:
        d, s = self.d, float(self.weight_exponent)
        t = radius / self.side
        return float(special.betaincc(d, s - d, t / (1 + t)))

    def tail_fraction(self) -> float:
        if self.profile == "radial":
            return self.radial_tail_fraction(self.radius)
        return 1 - (1 - self.axis_tail_fraction(self.radius)) ** self.d

    def effective_half_width(self, tol: float = 1e-10) -> float:
        """Smallest per-axis half-width whose neglected tail is below ``tol``."""
        R, s = self.side, float(self.weight_exponent)
        total = R + 2 * R / (s - 1)
        # 2R/(s-1) (1 + t/R)^{1-s} = tol * total
        t = R * ((tol * total * (s - 1) / (2 * R)) ** (1 / (1 - s)) - 1)
        return min(R / 2 + max(t, 0.0), self.radius)


def axis_weight_mass(box: BoxSpec) -> float:
    """``int w_1`` over ``[-T, T]`` by adaptive quadrature."""
    T = box.radius
    R = box.side
    f = lambda x: float(box.axis_weight(np.array(x)))  # noqa: E731
    inner = R  # weight is 1 on the box
    outer, _ = integrate.quad(f, R / 2, T, limit=200, epsabs=0, epsrel=1e-12)
    return inner + 2 * outer


def weight_mass(box: BoxSpec) -> float:
    """``int w_B`` over the truncated domain, via one-dimensional quadrature."""
    tail = box.tail_fraction()
    if tail > box.tail_tol:
        raise ConfigurationError(
            f"truncation {box.truncation} leaves tail fraction {tail:.3g} > {box.tail_tol}"
        )
    if box.profile == "product":
        return axis_weight_mass(box) ** box.d
    d, R, s = box.d, box.side, float(box.weight_exponent)
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    radial, _ = integrate.quad(
        lambda r: r ** (d - 1) * (1 + r / R) ** (-s),
        0,
        box.radius,
        points=[R / s, 10 * R / s],
        limit=400,
        epsabs=0,
        epsrel=1e-12,
    )
    return sphere * radial


def weight_mass_closed_form(box: BoxSpec) -> float:
    """Untruncated ``int_{R^d} w_B`` (independent route for tests)."""
    d, R, s = box.d, box.side, float(box.weight_exponent)
    if box.profile == "product":
        return (R + 2 * R / (s - 1)) ** d
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    return sphere * R**d * math.exp(special.betaln(d, s - d))


def weight_norm(box: BoxSpec, p: Exponent) -> float:
    """``||1||_{L^p(w_B)}``."""
    p = _check_p(p)
    if p == math.inf:
        return 1.0
    return weight_mass(box) ** (1.0 / float(p))


# ---------------------------------------------------------------------------
# Fresnel-type integrals F(a, b) = int_0^1 e(a xi + b xi^2) dxi
# ---------------------------------------------------------------------------

_FRESNEL_ASYMPTOTIC = 2.0e4
_TINY_B = 1e-6
_FAR_SHIFT = 1e3


def _fresnel_cs(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(C(u), S(u))``; cephes saturates to 1/2 for huge arguments, so use
    the two-term asymptotic expansion there."""
    shape = np.shape(u)
    s, c = special.fresnel(np.atleast_1d(u))
    u = np.atleast_1d(u)
    big = np.abs(u) > _FRESNEL_ASYMPTOTIC
    if np.any(big):
        x = np.abs(u[big])
        sgn = np.sign(u[big])
        arg = 0.5 * np.pi * x * x
        f = 1.0 / (np.pi * x)
        g = 1.0 / (np.pi**2 * x**3)
        c[big] = sgn * (0.5 + f * np.sin(arg) - g * np.cos(arg))
        s[big] = sgn * (0.5 - f * np.cos(arg) - g * np.sin(arg))
    return c.reshape(shape), s.reshape(shape)


def _phase(x: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * np.mod(x, 1.0))


def _power_moment(n: int, a: np.ndarray) -> np.ndarray:
    """``int_0^1 t^n e(a t) dt``: Taylor series for small ``|2 pi a|``, forward recursion otherwise."""
    c = 2j * np.pi * a
    near = np.abs(c) < 4.0
    series = sum(c**k / (math.factorial(k) * (n + k + 1)) for k in range(40))
    cs = np.where(near, 1.0, c)
    e = _phase(a)
    far = (e - 1) / cs
    for k in range(1, n + 1):
        far = (e - k * far) / cs
    return np.where(near, series, far)


def _small_b(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # second order in b; the dropped term is below (2 pi b)^3 / 42
    z = 2j * np.pi * b
    return np.sinc(a) * _phase(a / 2) + z * _power_moment(2, a) + z * z / 2 * _power_moment(4, a)


def _near(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fresnel C/S form of ``F``, for ``|a / 2b|`` of moderate size."""
    sgn = np.where(b < 0, -1.0, 1.0)
    shift = a / (2 * b)
    r = 2 * np.sqrt(np.abs(b))
    c1, s1 = _fresnel_cs(r * (1 + shift))
    c0, s0 = _fresnel_cs(r * shift)
    return _phase(-a * shift / 2) * ((c1 - c0) + 1j * sgn * (s1 - s0)) / r


def _far(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Faddeeva form of ``F`` for ``b > 0`` and ``a / 2b >= 0``; the large
    quadratic phase cancels analytically, so it stays accurate for huge shifts."""
    kappa = np.exp(-0.25j * np.pi) * np.sqrt(2 * np.pi * b)
    shift = a / (2 * b)
    w0 = special.wofz(1j * kappa * shift)
    w1 = special.wofz(1j * kappa * (1 + shift))
    return math.sqrt(math.pi) / (2 * kappa) * (w0 - _phase(a + b) * w1)


def _far_any(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # F(a, b) = conj F(-a, -b) and F(a, b) = e(a + b) F(-a - 2b, b)
    flip = b < 0
    a, b = np.where(flip, -a, a), np.abs(b)
    left = a < 0
    out = np.where(left, _phase(a + b), 1.0) * _far(np.where(left, -a - 2 * b, a), b)
    return np.where(flip, np.conj(out), out)


def fresnel_F(a, b) -> np.ndarray:
    """``F(a, b) = int_0^1 e(a t + b t^2) dt`` in closed form, accurate to about 1e-14 absolute."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    small = np.abs(b) < _TINY_B
    bs = np.where(small, 1.0, b)
    far = ~small & (np.abs(a / (2 * bs)) > _FAR_SHIFT)
    out = np.empty(a.shape, dtype=complex)
    for mask, fn in ((small, _small_b), (far, _far_any), (~small & ~far, _near)):
        if np.any(mask):
            out[mask] = fn(a[mask], b[mask])
    return out if out.ndim else out[()]


def fresnel_abs(a, b) -> np.ndarray:
    """``|F(a, b)|``."""
    return np.abs(fresnel_F(a, b))


def fresnel_quadrature(a: float, b: float, nodes_per_oscillation: int = 10, rtol: float = 1e-12) -> complex:
    """``F(a, b)`` by Gauss-Legendre panels, refined until two passes agree.

    Independent of the closed form; used to cross-check it.
    """
    if nodes_per_oscillation < 10:
        raise ConfigurationError("need at least 10 nodes per oscillation")
    osc = abs(a) + 2 * abs(b)
    panels = max(1, int(math.ceil(osc)))
    gx, gw = np.polynomial.legendre.leggauss(nodes_per_oscillation)
    prev = None
    for _ in range(6):
        edges = np.linspace(0.0, 1.0, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        xi = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        wt = (half[:, None] * gw[None, :]).ravel()
        val = complex(np.sum(wt * np.exp(2j * np.pi * (a * xi + b * xi * xi))))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
            return val
        prev = val
        panels *= 2
    return prev


@dataclass(frozen=True)
class FresnelTable:
    a: np.ndarray
    b: np.ndarray
    values: np.ndarray  # shape (len(b), len(a))


def fresnel_table(M: int, res: int = 2, extent: float | None = None,
                  budget: int = 50_000_000) -> FresnelTable:
    """``F`` on the grid of spacing ``1/res`` covering ``|a|, |b| <= extent``.

    ``extent`` defaults to ``delta^{-1} = M^2``.  ``F`` has unit bandwidth in
    both arguments, so ``res < 2`` undersamples it and is refused.
    """
    if res < 2:
        raise ConfigurationError("resolution below 2 samples per unit undersamples F")
    extent = float(M * M) if extent is None else float(extent)
    n = int(round(2 * extent * res)) + 1
    if n * n > budget:
        raise ResourceError(f"table of {n * n} entries exceeds the budget {budget}")
    grid = np.linspace(-extent, extent, n)
    vals = fresnel_F(grid[None, :], grid[:, None])
    return FresnelTable(grid.copy(), grid.copy(), vals)


# ---------------------------------------------------------------------------
# Ratio samples
# ---------------------------------------------------------------------------


class Kind(str, enum.Enum):
    CONSTANT = "constant"
    EXPSUM = "expsum"
    HYPERPLANE = "hyperplane"


@dataclass(frozen=True)
class RatioSample:
    kind: Kind
    spec: ex.ParaboloidSpec
    M: int
    p: Union[Fraction, float]
    q: Union[Fraction, float]
    numerator: float
    denominator: float
    err: float | None = None
    inner: str | None = None
    info: dict = field(default_factory=dict, compare=False)

    @property
    def ratio(self) -> float:
        return self.numerator / self.denominator

    @property
    def N(self) -> int:
        return self.M ** (self.spec.d - 1)


def lq_norm(values: np.ndarray, q: Union[Fraction, float]) -> float:
    values = np.asarray(values, dtype=float).ravel()
    if q == math.inf:
        return float(np.max(values))
    qf = float(q)
    return math.fsum(values**qf) ** (1.0 / qf)


def _check_q(q: Exponent) -> Union[Fraction, float]:
    q = as_exponent(q)
    if q <= 0:
        raise ValueError("q must be positive")
    return q


def _lq_count(count: int, q: Union[Fraction, float]) -> float:
    """l^q norm of ``count`` equal unit entries."""
    return 1.0 if q == math.inf else float(count) ** (1.0 / float(q))


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


# --- exponential sums --------------------------------------------------------


def expsum_numerator_power(M: int, p, d: int, ox: int = 4, xd_scale: int = 1,
                           budget: int = DEFAULT_NODE_BUDGET) -> float:
    """``int_B |Eg|^p`` for the point-mass test function in dimension ``d``.

    The x_i integrals run over ``M`` full periods and the x_d integral over
    one, so the integral collapses to the profile of ``S_p``; no sign of
    ``v`` survives.
    """
    size = xd_scale * profile_size(M, p, power=d - 1)
    prof = sp_profile(M, p, xd_size=size, ox=ox, budget=budget)
    return 2.0 ** (-d) * float(M) ** (2 * d) * prof.integrate(power=d - 1)


def ratio_expsum(spec: ex.ParaboloidSpec, M: int, p: Exponent, q: Exponent,
                 box: BoxSpec | None = None, ox: int = 4, with_error: bool = False,
                 budget: int = DEFAULT_NODE_BUDGET) -> RatioSample:
    """Decoupling ratio of the sum of point masses above the cap corners."""
    p, q = _check_p(p), _check_q(q)
    d = spec.d
    box = box or BoxSpec(d, M)
    if M ** d > budget:
        raise ResourceError(f"M^d = {M ** d} exceeds the budget {budget}")
    N = M ** (d - 1)
    denominator = _lq_count(N, q) * weight_norm(box, p)
    err = None
    if p == math.inf:
        numerator = float(N)  # |Eg(0)|
    else:
        pf = float(p)
        numerator = expsum_numerator_power(M, p, d, ox, budget=budget) ** (1 / pf)
        if with_error:
            fine = expsum_numerator_power(M, p, d, 2 * ox, xd_scale=2, budget=budget) ** (1 / pf)
            err = (abs(fine - numerator) + 1e-12 * fine) / denominator
            numerator = fine
    return RatioSample(Kind.EXPSUM, spec, M, p, q, numerator, denominator, err)


# --- constant function ---------------------------------------------------------


def constant_numerator_power(M: int, p, d: int, h: float = 0.5,
                             budget: int = 400_000_000) -> float:
    """``int_B |E1|^p = int G(x_d)^{d-1} dx_d`` with ``G(b) = int |F(a, b)|^p da``.

    Uses ``|F(a, -b)| = |F(-a, b)|``, so ``G`` is even and the sign vector
    drops out.  Trapezoid rule on spacing ``h`` (unit scale, oversampled).
    """
    p = _check_p(p)
    R = float(M * M)
    n = int(round(R / h)) + 1
    if n * n > budget:
        raise ResourceError(f"{n * n} Fresnel evaluations exceed the budget {budget}")
    x = np.linspace(-R / 2, R / 2, n)
    wx = _trapezoid_weights(n, x[1] - x[0])
    half = n // 2  # x[half] == 0
    G = np.empty(n)
    step = max(1, (1 << 21) // n)
    for start in range(half, n, step):
        rows = np.arange(start, min(n, start + step))
        vals = _abs_pow(fresnel_abs(x[None, :], x[rows, None]), p)
        G[rows] = vals @ wx
    G[:half] = G[n - 1 : half : -1]
    return float(np.dot(wx, G ** (d - 1)))


def _node_weights(x: np.ndarray) -> np.ndarray:
    """Trapezoid weights for sorted, possibly nonuniform nodes."""
    w = np.empty_like(x)
    gaps = np.diff(x)
    w[0], w[-1] = gaps[0] / 2, gaps[-1] / 2
    w[1:-1] = (gaps[:-1] + gaps[1:]) / 2
    return w


def _cell_grid(box: BoxSpec, p) -> np.ndarray:
    """Nodes for the per-cap integrals.

    Uniform inside the box at about ``2 max(p, 4)`` nodes per period ``M`` of
    ``|F(x/M, .)|``; finer outside, where the weight decays on the scale
    ``R / weight_exponent``.  The faces ``+-R/2`` are nodes.
    """
    M, R = box.M, box.side
    pf = 4.0 if p == math.inf else max(float(p), 4.0)
    h0 = M / (2 * pf)
    m = max(1, int(math.ceil((R / 2) / h0)))
    inner = np.linspace(0.0, R / 2, m + 1)
    T = box.effective_half_width()
    h_tail = min(R / (2 * m), R / (4 * float(box.weight_exponent)))
    k = max(1, int(math.ceil((T - R / 2) / h_tail)))
    tail = np.linspace(R / 2, R / 2 + k * h_tail, k + 1)[1:]
    half = np.concatenate([inner, tail])
    return np.concatenate([-half[:0:-1], half])


def constant_axis_profiles(box: BoxSpec, p, grid: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``H[k, t] = int w_1(x) |F(x/M + 2 k x_d/M^2, x_d/M^2)|^p dx`` at ``x_d = grid[t]``.

    ``|E1_Q|`` for the cap with corner indices ``k_i`` is
    ``M^{-(d-1)} prod_i |F(x_i/M + 2 v_i k_i x_d/M^2, v_i x_d/M^2)|``; the
    reflection ``x_i -> -x_i`` removes ``v_i``, so one table serves all signs.
    """
    M = box.M
    if grid is None:
        grid = _cell_grid(box, p)
    wx = box.axis_weight(grid) * _node_weights(grid)
    H = np.empty((M, grid.size))
    b = grid / M**2
    for k in range(M):
        a = grid[None, :] / M + 2 * k * b[:, None]
        vals = _abs_pow(fresnel_abs(a, np.broadcast_to(b[:, None], a.shape)), p)
        H[k] = vals @ wx
    return grid, H


def constant_cell_norms(box: BoxSpec, p, budget: int = 5_000_000_000) -> np.ndarray:
    """``||E1_Q||_{L^p(w_B)}`` for every cap, as an array of shape ``(M,)*(d-1)``."""
    if box.profile != "product":
        raise ConfigurationError("cell norms of E1 need the separable product weight")
    p = _check_p(p)
    d, M = box.d, box.M
    if p == math.inf:
        # |E1_Q| <= |Q| with equality at the origin, where the weight is 1
        return np.full((M,) * (d - 1), float(M) ** (-(d - 1)))
    grid = _cell_grid(box, p)
    cost = M * grid.size**2 + M ** (d - 1) * grid.size
    if cost > budget:
        raise ResourceError(f"cell-norm work {cost} exceeds the budget {budget}")
    grid, H = constant_axis_profiles(box, p, grid)
    wd = box.axis_weight(grid) * _node_weights(grid)
    pf = float(p)
    scale = float(M) ** (-pf * (d - 1))
    if d == 2:
        integrals = H @ wd
    else:
        integrals = np.empty((M,) * (d - 1))
        for idx in itertools.product(range(M), repeat=d - 2):
            prod = np.prod(H[list(idx)], axis=0) if idx else np.ones(grid.size)
            integrals[idx] = (H * prod[None, :]) @ wd
    return (scale * integrals) ** (1.0 / pf)


def ratio_constant(spec: ex.ParaboloidSpec, M: int, p: Exponent, q: Exponent,
                   box: BoxSpec | None = None, h: float = 0.5,
                   with_error: bool = False) -> RatioSample:
    """Decoupling ratio of ``g = 1``."""
    p, q = _check_p(p), _check_q(q)
    d = spec.d
    box = box or BoxSpec(d, M)
    if p == math.inf:
        numerator = float(np.prod(fresnel_abs(np.zeros(d - 1), np.zeros(d - 1))))  # |E1(0)|
        cells = constant_cell_norms(box, p)
        return RatioSample(Kind.CONSTANT, spec, M, p, q, numerator, lq_norm(cells, q))
    pf = float(p)
    numerator = constant_numerator_power(M, p, d, h) ** (1 / pf)
    denominator = lq_norm(constant_cell_norms(box, p), q)
    err = None
    if with_error:
        fine = constant_numerator_power(M, p, d, h / 2) ** (1 / pf)
        err = (abs(fine - numerator) + 1e-12 * fine) / denominator
        numerator = fine
    return RatioSample(Kind.CONSTANT, spec, M, p, q, numerator, denominator, err)


# --- hyperplane ----------------------------------------------------------------


def diagonal_pair_integral(M: int, p, ox: int = 4) -> float:
    """``int_{[-R/2,R/2]^2} |sum_j e(j (x+y)/M)|^p dx dy`` with ``R = M^2``.

    Reduced along ``z = x + y`` to ``M^2 int_{-M}^{M} (M - |u|) |D_M(u)|^p du``
    and evaluated on the periodic grid of ``ox (2M+1)`` nodes per unit.
    """
    p = _check_p(p)
    nx = ox * (2 * M + 1)
    row = weyl_rows(M, np.zeros(1, dtype=np.int64), 1, nx)[0]
    g = np.real(_abs_pow(row, p)) if p != math.inf else np.abs(row)
    t = np.arange(nx) / nx
    parts = []
    for k in range(-M, M):
        u = k + t
        parts.append(float(np.dot(M - np.abs(u), g)) / nx)
    total = math.fsum(parts)
    return float(M) ** 2 * total


def dirichlet_factor(M: int, p, ox: int = 4) -> float:
    """``delta^{-1} int_{-1/delta}^{1/delta} |sum_j e(delta^{1/2} j z)|^p dz``.

    The one-dimensional factor the diagonal pairs contribute, up to a
    constant; substituting ``z = M u`` leaves ``2M`` periods of ``|D_M|^p``.
    """
    p = _check_p(p)
    nx = ox * (2 * M + 1)
    row = weyl_rows(M, np.zeros(1, dtype=np.int64), 1, nx)[0]
    one_period = float(np.sum(np.real(_abs_pow(row, p)))) / nx
    return float(M) ** 2 * float(M) * (2 * M) * one_period


def inner_kind(spec: ex.ParaboloidSpec, p) -> Kind | None:
    """Extremizer for the elliptic factor in ``d - 2 dv`` dimensions."""
    d_inner = spec.d - 2 * spec.dv
    if d_inner == 1:
        return None
    p_crit = Fraction(2 * (d_inner + 1), d_inner - 1)
    return Kind.CONSTANT if as_exponent(p) >= p_crit else Kind.EXPSUM


def ratio_hyperplane(spec: ex.ParaboloidSpec, M: int, p: Exponent, q: Exponent,
                     box: BoxSpec | None = None, ox: int = 4, h: float = 0.5,
                     with_error: bool = False) -> RatioSample:
    """Decoupling ratio of masses on the diagonals ``xi_k = xi_{k+dv}``.

    Each diagonal pair carries the points ``xi_k = xi_{k+dv} = j/M``, one per
    diagonal cap (the point ``j/M`` is assigned to the cap ``((j-1)/M, j/M]``);
    off-diagonal caps carry nothing.
    """
    p, q = _check_p(p), _check_q(q)
    dv = spec.dv
    if dv < 1:
        raise ValueError("the hyperplane test function needs a hyperbolic paraboloid")
    d = spec.d
    d_inner = d - 2 * dv
    box = box or BoxSpec(d, M)
    kind = inner_kind(spec, p)
    inner_spec = ex.ParaboloidSpec.elliptic(d_inner) if d_inner >= 2 else None
    n_inner = M ** (d_inner - 1)

    def numerator_power(ox_: int, h_: float, scale: int) -> float:
        pair = diagonal_pair_integral(M, p, ox_) ** dv
        if kind is None:
            return pair * box.side  # x_d only
        if kind is Kind.EXPSUM:
            return pair * expsum_numerator_power(M, p, d_inner, ox_, xd_scale=scale)
        return pair * constant_numerator_power(M, p, d_inner, h_)

    if p == math.inf:
        inner_sup = {None: 1.0, Kind.EXPSUM: float(n_inner), Kind.CONSTANT: 1.0}[kind]
        numerator = float(M) ** dv * inner_sup
    else:
        numerator = numerator_power(ox, h, 1) ** (1 / float(p))

    # denominator: M^dv diagonal cap products times the inner caps
    if kind is Kind.CONSTANT:
        if box.profile != "product":
            raise ConfigurationError("constant inner factor needs the product weight")
        inner_box = BoxSpec(d_inner, M, "product", box.weight_exponent, box.truncation, box.tail_tol)
        pair_box = BoxSpec(2 * dv, M, "product", box.weight_exponent, box.truncation, box.tail_tol)
        cells = constant_cell_norms(inner_box, p) * weight_norm(pair_box, p)
        denominator = _lq_count(M**dv, q) * lq_norm(cells, q)
    else:
        denominator = _lq_count(M**dv * n_inner, q) * weight_norm(box, p)

    err = None
    if with_error and p != math.inf:
        fine = numerator_power(2 * ox, h / 2, 2) ** (1 / float(p))
        err = (abs(fine - numerator) + 1e-12 * fine) / denominator
        numerator = fine
    return RatioSample(Kind.HYPERPLANE, spec, M, p, q, numerator, denominator, err,
                       inner=None if kind is None else kind.value,
                       info={"inner_spec": None if inner_spec is None else inner_spec.signs})


# ---------------------------------------------------------------------------
# Ladders and predictions
# ---------------------------------------------------------------------------

DEFAULT_LADDER = (8, 16, 32, 64)


def ratio(kind: Kind | str, spec: ex.ParaboloidSpec, M: int, p, q, **kwargs) -> RatioSample:
    kind = Kind(kind)
    fn = {Kind.CONSTANT: ratio_constant, Kind.EXPSUM: ratio_expsum,
          Kind.HYPERPLANE: ratio_hyperplane}[kind]
    return fn(spec, M, p, q, **kwargs)


def ratio_ladder(kind, spec: ex.ParaboloidSpec, p, q, Ms: Sequence[int] = DEFAULT_LADDER,
                 **kwargs) -> list[RatioSample]:
    return [ratio(kind, spec, M, p, q, **kwargs) for M in Ms]


def predicted_lower_bound(kind: Kind | str, spec: ex.ParaboloidSpec, p, q) -> Fraction:
    pt = ex.DiagramPoint.from_pq(_pq_text(p), _pq_text(q))
    kind = Kind(kind)
    if kind is Kind.CONSTANT:
        return ex.lower_bound_constant(spec, pt)
    if kind is Kind.EXPSUM:
        return ex.lower_bound_expsum(spec, pt)
    return ex.lower_bound_hyperplane(spec, pt)


def predicted_sharp(spec: ex.ParaboloidSpec, p, q) -> Fraction:
    pt = ex.DiagramPoint.from_pq(_pq_text(p), _pq_text(q))
    return ex.sharp_exponent(spec, pt).sharp


def _pq_text(p) -> str:
    p = as_exponent(p)
    return "inf" if p == math.inf else str(p)
