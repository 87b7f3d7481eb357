"""Scalar points of a domain and automorphisms of the unit ball.

The scalar domain of ``f`` is ``{l : sum a_w |l^w|^2 <= 1}``, a Reinhardt
domain.  The ball part works in ``C^n`` with ``<z, w> = sum z_j conj(w_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArityError, GeometryError
from .symbol import Symbol, word_product

SCALAR_SLACK = 1e-12


def _point(f: Symbol, point) -> np.ndarray:
    z = np.asarray(point, dtype=complex).ravel()
    if z.size != f.n:
        raise ArityError(f"point has {z.size} coordinates, symbol has arity {f.n}")
    return z


def q_value(f: Symbol, point) -> float:
    """``sum a_w |l^w|^2`` over the support of ``f``."""
    mod2 = np.abs(_point(f, point)) ** 2
    return float(sum(float(a) * word_product(mod2, w) for w, a in f.terms))


def scalar_member(f: Symbol, point) -> bool:
    return q_value(f, point) <= 1 + SCALAR_SLACK


def boundary_radius(f: Symbol, direction, tol: float = 1e-12, max_iter: int = 200) -> float:
    """The ``r > 0`` with ``q_value(f, r u) = 1`` for the normalized direction ``u``.

    ``r -> q(r u)`` is strictly increasing and unbounded because every
    degree-one coefficient is positive, so bracketing then bisecting finds it.
    """
    u = _point(f, direction)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise GeometryError("direction must be nonzero")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    u = u / norm
    lo, hi = 0.0, 1.0
    while q_value(f, hi * u) <= 1:
        lo, hi = hi, 2 * hi
    mid = (lo + hi) / 2
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        q = q_value(f, mid * u)
        if abs(q - 1) <= tol:
            break
        if q < 1:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    return mid


def boundary_samples(f: Symbol, m: int, rng=None, tol: float = 1e-12) -> np.ndarray:
    """``m`` boundary points along uniformly random complex directions."""
    rng = np.random.default_rng(rng)
    out = np.empty((m, f.n), dtype=complex)
    for k in range(m):
        u = rng.normal(size=f.n) + 1j * rng.normal(size=f.n)
        u /= np.linalg.norm(u)
        out[k] = boundary_radius(f, u, tol) * u
    return out


@dataclass(frozen=True)
class BallPoint:
    z: np.ndarray
    norm2: float

    @classmethod
    def of(cls, z) -> "BallPoint":
        if isinstance(z, BallPoint):
            return z
        z = np.asarray(z, dtype=complex).ravel()
        return cls(z, float(np.vdot(z, z).real))

    @property
    def in_ball(self) -> bool:
        return self.norm2 <= 1


def inner(z, w) -> complex:
    """``<z, w>``, linear in ``z``."""
    return complex(np.vdot(w, z))


def moebius(omega, z) -> BallPoint:
    """Involutive ball automorphism exchanging ``0`` and ``omega``.

    ``(omega - P z - s Q z) / (1 - <z, omega>)`` where ``P`` projects onto
    ``C omega``, ``Q = I - P`` and ``s = sqrt(1 - |omega|^2)``.
    """
    w = BallPoint.of(omega)
    p = BallPoint.of(z)
    if w.z.size != p.z.size:
        raise ArityError(f"omega has {w.z.size} coordinates, z has {p.z.size}")
    if w.norm2 >= 1:
        raise GeometryError(f"|omega|^2 = {w.norm2} must be < 1")
    denom = 1 - inner(p.z, w.z)
    if abs(denom) < 1e-14:
        raise GeometryError("z sits on the pole of the automorphism")
    if w.norm2 == 0:
        Pz = np.zeros_like(p.z)
    else:
        Pz = inner(p.z, w.z) / w.norm2 * w.z
    s = math.sqrt(1 - w.norm2)
    return BallPoint.of((w.z - Pz - s * (p.z - Pz)) / denom)


@dataclass(frozen=True)
class CircleFit:
    center: np.ndarray
    radius: float
    basis: np.ndarray
    residual: float

    def distance(self, point) -> float:
        """Euclidean distance from ``point`` in ``C^n`` to the fitted circle."""
        x = _realify(np.asarray(point, dtype=complex).ravel()) - _realify(self.center)
        inplane = self.basis @ x
        normal = x - self.basis.T @ inplane
        return float(math.hypot(np.linalg.norm(normal), np.linalg.norm(inplane) - self.radius))

    def to_json(self) -> dict:
        return {
            "center": [[float(c.real), float(c.imag)] for c in self.center],
            "radius": float(self.radius),
            "residual": float(self.residual),
        }


def _realify(z):
    return np.concatenate([z.real, z.imag], axis=-1)


def _complexify(x):
    k = x.shape[-1] // 2
    return x[..., :k] + 1j * x[..., k:]


def fit_circle(points) -> CircleFit:
    """Circle through complex sample points in ``C^n`` viewed as ``R^(2n)``.

    The plane is the best-fit 2-plane of the centered samples; center and
    radius come from an algebraic least-squares fit inside that plane.
    """
    X = _realify(np.asarray(points, dtype=complex))
    mean = X.mean(axis=0)
    _, svals, vt = np.linalg.svd(X - mean, full_matrices=False)
    if svals.size < 2 or svals[1] <= 1e-9 * max(svals[0], 1e-300):
        raise GeometryError("samples are collinear; no circle fits")
    basis = vt[:2]
    uv = (X - mean) @ basis.T
    A = np.column_stack([2 * uv, np.ones(len(uv))])
    sol, *_ = np.linalg.lstsq(A, np.sum(uv**2, axis=1), rcond=None)
    c2 = sol[:2]
    radius = math.sqrt(max(sol[2] + c2 @ c2, 0.0))
    center_real = mean + basis.T @ c2
    fit = CircleFit(_complexify(center_real), radius, basis, 0.0)
    residual = max(fit.distance(_complexify(x)) for x in X)
    return CircleFit(fit.center, radius, basis, residual)


def circle_image(omega, U=None, m: int = 64) -> CircleFit:
    """Fit the image of ``{e^(i t) omega}`` under ``z -> U moebius(omega, z)``."""
    w = BallPoint.of(omega)
    if not 0 < w.norm2 < 1:
        raise GeometryError("need 0 < |omega| < 1")
    if m < 16:
        raise ValueError("use at least 16 samples")
    U = np.eye(w.z.size, dtype=complex) if U is None else np.asarray(U, dtype=complex)
    if U.shape != (w.z.size, w.z.size):
        raise ArityError(f"U has shape {U.shape}, expected {(w.z.size,) * 2}")
    if np.max(np.abs(U.conj().T @ U - np.eye(w.z.size))) > 1e-12:
        raise GeometryError("U is not unitary")
    thetas = 2 * np.pi * np.arange(m) / m
    images = np.array([U @ moebius(w, np.exp(1j * t) * w.z).z for t in thetas])
    return fit_circle(images)


def random_unitary(n: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    rng = np.random.default_rng(rng)
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
