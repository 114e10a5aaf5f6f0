"""
Numerically stable scalar functions for the perceptron codec.

- gaussian_tail / inv_gaussian_tail: H(x) = P(Z > x) for a standard normal Z
- binary_entropy / inv_binary_entropy: H2 in bits and its inverse on [0, 1/2]
- xi_integrals: Gaussian averages of the factor Xi_{k,y}(U) and of its first two
  derivatives in the centre of U, in closed form

Every function accepts scalars or numpy arrays (broadcast elementwise).
"""
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize, special

from app.exceptions import InvalidParameterError, NumericOverflowError

ArrayLike = Union[float, np.ndarray]

SQRT2 = np.sqrt(2.0)
SQRT_2PI = np.sqrt(2.0 * np.pi)
ENTROPY_TOL = 1e-12
DEFAULT_EPSILON_Q = 1e-12
TAIL_FLOOR = np.finfo(np.float64).tiny
TAIL_CEIL = np.nextafter(1.0, 0.0)


def _check_finite(x, name: str):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite")
    return arr


def _scalar_or_array(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def gaussian_tail(x: ArrayLike) -> ArrayLike:
    """
    H(x) = integral_x^inf exp(-z^2/2)/sqrt(2 pi) dz, via erfc.

    The result stays inside the open interval (0, 1). Past x ~ 37.5 the tail drops
    below the smallest normal double and is raised to TAIL_FLOOR; below x ~ -8.3
    it rounds to 1 and is lowered to TAIL_CEIL.
    """
    arr = _check_finite(x, "x")
    return _scalar_or_array(np.clip(0.5 * special.erfc(arr / SQRT2), TAIL_FLOOR, TAIL_CEIL))


def inv_gaussian_tail(t: ArrayLike) -> ArrayLike:
    """The x with H(x) = t, for t in (0, 1)."""
    arr = np.asarray(t, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise InvalidParameterError(f"tail probability must lie in (0, 1), got {t}")
    return _scalar_or_array(-special.ndtri(arr))


def binary_entropy(q: ArrayLike) -> ArrayLike:
    """H2(q) in bits, with 0 log 0 = 0."""
    arr = np.asarray(q, dtype=np.float64)
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise InvalidParameterError(f"binary_entropy needs q in [0, 1], got {q}")
    h = (special.entr(arr) + special.entr(1.0 - arr)) / np.log(2.0)
    return _scalar_or_array(np.clip(h, 0.0, 1.0))


def inv_binary_entropy(h: float) -> float:
    """The q in [0, 1/2] with binary_entropy(q) = h, by bisection."""
    h = float(h)
    if not (0.0 <= h <= 1.0):
        raise InvalidParameterError(f"inv_binary_entropy needs h in [0, 1], got {h}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    return optimize.bisect(lambda q: binary_entropy(q) - h, 0.0, 0.5, xtol=ENTROPY_TOL, maxiter=200)


@dataclass(frozen=True)
class CavityGeometry:
    """Standardized threshold positions of the cavity Gaussian U."""
    w_minus: ArrayLike
    w_plus: ArrayLike
    one_minus_q: float


@dataclass(frozen=True)
class XiIntegrals:
    """i0 = <Xi>, i1 = <Xi'>, i2 = <Xi''> under the cavity Gaussian."""
    i0: ArrayLike
    i1: ArrayLike
    i2: ArrayLike


def cavity_geometry(delta: ArrayLike, a: ArrayLike, q: float, k: float,
                    epsilon_q: float = DEFAULT_EPSILON_Q) -> CavityGeometry:
    """w_pm = (+-k - delta + (1-q) a) / sqrt(1-q), with 1-q clamped at epsilon_q."""
    one_minus_q = max(1.0 - float(q), epsilon_q)
    scale = np.sqrt(one_minus_q)
    shift = -np.asarray(delta, dtype=np.float64) + one_minus_q * np.asarray(a, dtype=np.float64)
    return CavityGeometry(
        w_minus=(-k + shift) / scale,
        w_plus=(k + shift) / scale,
        one_minus_q=one_minus_q,
    )


def _interval_masses(w_lo: np.ndarray, w_hi: np.ndarray):
    """
    P(w_lo < Z < w_hi) and its complement, each without cancellation.
    Requires w_lo <= w_hi.
    """
    tail_hi = 0.5 * special.erfc(w_hi / SQRT2)      # H(w_hi)
    head_lo = 0.5 * special.erfc(-w_lo / SQRT2)     # 1 - H(w_lo) = H(-w_lo)
    # both tails right of zero / left of zero / straddling
    inside = np.where(
        w_lo > 0.0,
        0.5 * special.erfc(w_lo / SQRT2) - tail_hi,
        np.where(
            w_hi < 0.0,
            0.5 * special.erfc(-w_hi / SQRT2) - head_lo,
            1.0 - (tail_hi + head_lo),
        ),
    )
    outside = tail_hi + head_lo
    return inside, outside


def _exp_half_sq(w: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * w * w)


def _gauss_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """exp(-a^2/2) - exp(-b^2/2), factoring out the larger exponential first."""
    a_small = np.abs(a) <= np.abs(b)
    # exp(-s^2/2) * (1 - exp(-(l^2 - s^2)/2)) with l^2 - s^2 = (l - s)(l + s)
    forward = _exp_half_sq(a) * -np.expm1(-0.5 * (b - a) * (b + a))
    backward = -(_exp_half_sq(b) * -np.expm1(-0.5 * (a - b) * (a + b)))
    return np.where(a_small, forward, backward)


def _weighted_gauss_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a exp(-a^2/2) - b exp(-b^2/2), scaled by the larger exponential first."""
    s = np.where(np.abs(a) <= np.abs(b), a, b)
    ra = np.exp(-0.5 * (a - s) * (a + s))
    rb = np.exp(-0.5 * (b - s) * (b + s))
    return _exp_half_sq(s) * (a * ra - b * rb)


def xi_integrals(y: ArrayLike, delta: ArrayLike, a: ArrayLike, q: float, k: float, beta: float,
                 epsilon_q: float = DEFAULT_EPSILON_Q) -> XiIntegrals:
    """
    Closed forms of the Gaussian averages of Xi_{k,y}(U), U = delta - (1-q) a + sqrt(1-q) z,
    where Xi_{k,y}(u) = exp[-(beta/2)(1 - y f_k(u))].

    i0 = e^-b + (1 - e^-b) [y H(w-) - y H(w+) - (y - 1)/2]
    i1 = (1 - e^-b) y / sqrt(2 pi (1-q)) [exp(-w-^2/2) - exp(-w+^2/2)]
    i2 = (1 - e^-b) y / (sqrt(2 pi) (1-q)) [w- exp(-w-^2/2) - w+ exp(-w+^2/2)]

    Derivatives are taken with respect to the centre of U.
    """
    if not (0.0 <= q < 1.0):
        raise InvalidParameterError(f"overlap q must lie in [0, 1), got {q}")
    if k < 0.0:
        raise InvalidParameterError(f"threshold k must be >= 0, got {k}")
    if not beta > 0.0:
        raise InvalidParameterError(f"beta must be positive, got {beta}")

    y = np.asarray(y, dtype=np.float64)
    geometry = cavity_geometry(delta, a, q, k, epsilon_q)
    w_minus = np.asarray(geometry.w_minus, dtype=np.float64)
    w_plus = np.asarray(geometry.w_plus, dtype=np.float64)
    one_minus_q = geometry.one_minus_q

    floor = np.exp(-beta)
    weight = -np.expm1(-beta)  # 1 - e^-beta, accurate for small beta

    with np.errstate(over="ignore", invalid="ignore"):
        inside, outside = _interval_masses(w_minus, w_plus)
        agree = np.where(y > 0, inside, outside)
        i0 = floor + weight * agree
        i1 = weight * y * _gauss_diff(w_minus, w_plus) / np.sqrt(2.0 * np.pi * one_minus_q)
        i2 = weight * y * _weighted_gauss_diff(w_minus, w_plus) / (SQRT_2PI * one_minus_q)

    if not (np.all(np.isfinite(i0)) and np.all(np.isfinite(i1)) and np.all(np.isfinite(i2))):
        bad = ~(np.isfinite(i0) & np.isfinite(i1) & np.isfinite(i2))
        raise NumericOverflowError(
            w_minus=np.broadcast_to(w_minus, bad.shape)[bad].tolist(),
            w_plus=np.broadcast_to(w_plus, bad.shape)[bad].tolist(),
        )

    return XiIntegrals(i0=_scalar_or_array(i0), i1=_scalar_or_array(i1), i2=_scalar_or_array(i2))
