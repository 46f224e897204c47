"""Eigenstrains of still states under finite deformation.

Rod lengths are scaled so that short rods have length 1 and long rods
length ``a = 1 + s``.  Eigenstrains are symmetric 2x2 arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FractionSumError, NoRealRotation, ParameterOutOfRange
from .strain import Q_INV, m_map

SQRT3 = math.sqrt(3.0)
STATE_NAMES = ("alpha", "beta", "gamma", "gamma'", "gamma''", "delta", "delta'", "delta''")

_c, _s = math.cos(math.pi / 3), math.sin(math.pi / 3)
ROT60 = np.array([[_c, -_s], [_s, _c]])

# Rod length per lattice family (q1, q2, q3) for a = 'a', short = 1.
_LENGTH_PATTERN = {
    "alpha": "111",
    "beta": "aaa",
    "gamma": "aa1",
    "gamma'": "a1a",
    "gamma''": "1aa",
    "delta": "11a",
    "delta'": "a11",
    "delta''": "1a1",
}
DUAL = {
    "alpha": "beta", "beta": "alpha",
    "gamma": "delta", "gamma'": "delta''", "gamma''": "delta'",
    "delta": "gamma", "delta'": "gamma''", "delta''": "gamma'",
}


@dataclass(frozen=True)
class HomogeneousState:
    name: str
    a: float
    eigenstrain: np.ndarray


def _check_a(a, lo=0.5, hi=2.0):
    if not lo < a < hi:
        raise ParameterOutOfRange(f"long-rod length a={a} outside ({lo}, {hi})")


def gamma_angle(a):
    """Base angle of the (a, a, 1) isosceles triangle."""
    return math.acos(1.0 / (2.0 * a))


def delta_angle(a):
    """Base angle of the (1, 1, a) isosceles triangle."""
    return math.acos(a / 2.0)


def twin_rotate(E, sign: int):
    """Conjugate by the 60 degree rotation: ``R^T E R`` for +1, ``R E R^T`` for -1."""
    E = np.asarray(E, dtype=float)
    if sign == 1:
        return ROT60.T @ E @ ROT60
    if sign == -1:
        return ROT60 @ E @ ROT60.T
    raise ValueError(f"sign must be +1 or -1, got {sign}")


def homogeneous_state(name: str, a: float) -> HomogeneousState:
    if name not in STATE_NAMES:
        raise ValueError(f"unknown homogeneous state {name!r}")
    _check_a(a)
    base = name.rstrip("'")
    if base == "alpha":
        E = np.eye(2)
    elif base == "beta":
        E = a * np.eye(2)
    elif base == "gamma":
        g = gamma_angle(a)
        E = np.diag([math.tan(g) / SQRT3, 1.0])
    else:
        d = delta_angle(a)
        E = np.diag([2 * math.sin(d) / SQRT3, 2 * math.cos(d)])
    primes = len(name) - len(base)
    if primes == 1:
        E = twin_rotate(E, +1)
    elif primes == 2:
        E = twin_rotate(E, -1)
    return HomogeneousState(name, float(a), E)


def rod_lengths(name: str, a: float):
    """Rod length of each lattice family in a homogeneous state."""
    return np.array([a if ch == "a" else 1.0 for ch in _LENGTH_PATTERN[name]])


def stretch_eigenvalues_from_lengths(lengths):
    """Principal stretches of the affine map sending unit rods to ``lengths``.

    The metric ``C = F^T F`` satisfies ``q_r . C q_r = L_r^2``; the stretches
    are the square roots of its eigenvalues.
    """
    C = m_map(Q_INV @ np.asarray(lengths, dtype=float) ** 2)
    return np.sqrt(np.linalg.eigvalsh(C))


def laminate_compatible(Ey, Ez, tol: float = 1e-12):
    """Whether two eigenstrains share a tangent component, and that tangent.

    Compatible iff ``det(Ey - Ez) <= 0``; the returned unit ``tau`` satisfies
    ``tau^T (Ey - Ez) tau = 0``.
    """
    D = np.asarray(Ey, dtype=float) - np.asarray(Ez, dtype=float)
    D = 0.5 * (D + D.T)
    scale = max(1.0, float(np.abs(D).max()))
    d, V = np.linalg.eigh(D)
    if np.all(np.abs(d) <= tol * scale):
        return True, np.array([1.0, 0.0])
    if d[0] * d[1] > tol * scale * scale:
        return False, None
    lo, hi = min(d[0], 0.0), max(d[1], 0.0)
    tau = V @ np.array([math.sqrt(hi), math.sqrt(-lo)])
    return True, tau / np.linalg.norm(tau)


def laminate_mix(states, fractions, tol: float = 1e-12):
    fractions = np.asarray(fractions, dtype=float)
    if np.any(fractions < 0):
        raise FractionSumError(f"volume fractions must be nonnegative: {fractions}")
    if abs(fractions.sum() - 1.0) > tol:
        raise FractionSumError(f"volume fractions sum to {fractions.sum()!r}, not 1")
    states = np.asarray(states, dtype=float)
    return np.einsum("i,ijk->jk", fractions, states)


@dataclass(frozen=True)
class RotatedDelta:
    G: np.ndarray
    rho: float
    rho_squared_printed: float


def rotate_delta_to_tangent(a: float) -> RotatedDelta:
    """Delta state re-expressed with unit tangent entry ``G[1, 1] = 1``.

    Trace and determinant match the delta eigenstrain; the off-diagonal entry
    is the nonnegative root.  ``rho_squared_printed`` evaluates the closed form
    ``(2 cos b - 1)(2 sqrt3 sin b - 3) / 3`` at ``b = delta`` for comparison.
    """
    if not 1.0 <= a < 2.0:
        raise ParameterOutOfRange(f"a={a} outside [1, 2)")
    Ed = homogeneous_state("delta", a).eigenstrain
    tr, det = np.trace(Ed), np.linalg.det(Ed)
    g11 = tr - 1.0
    rho2 = g11 - det
    if rho2 < -1e-14:
        raise NoRealRotation(f"det {det} exceeds trace - 1 = {g11}; no real rotation")
    rho = math.sqrt(max(rho2, 0.0))
    b = delta_angle(a)
    printed = (2 * math.cos(b) - 1) * (2 * math.sin(b) * SQRT3 - 3) / 3
    return RotatedDelta(np.array([[g11, rho], [rho, 1.0]]), rho, printed)


def twin_mix(a: float, mu: float):
    """Twin laminate of two mirror orientations of the rotated delta state."""
    if not 0.0 <= mu <= 1.0:
        raise ParameterOutOfRange(f"mu={mu} outside [0, 1]")
    rd = rotate_delta_to_tangent(a)
    off = (1 - 2 * mu) * rd.rho
    return np.array([[rd.G[0, 0], off], [off, 1.0]])


def hex_assembly(k: int, n1: int, n2: int, n3: int, a: float):
    """Eigenstrain of the hexagon-triangle-strip assembly and its pair count."""
    if min(k, n1, n2, n3) < 1:
        raise ParameterOutOfRange("assembly counts must be positive")
    st = {nm: homogeneous_state(nm, a).eigenstrain for nm in ("alpha", "beta", "delta", "delta'", "delta''")}
    pairs = n1 * n2 + n2 * n3 + n3 * n1
    D = (
        k * (k + 1) * st["alpha"]
        + n1 * k * st["delta"]
        + n2 * k * st["delta'"]
        + n3 * k * st["delta''"]
        + pairs * st["beta"]
    )
    N = k * (k + 1 + n1 + n2 + n3) + pairs
    return D / N, N


def isotropic_factor(k: int, n: int, a: float):
    """Closed-form isotropic stretch of the assembly with n1 = n2 = n3 = n."""
    tr_delta = np.trace(homogeneous_state("delta", a).eigenstrain)
    num = k * (k + 1) + 1.5 * n * k * tr_delta + 3 * n * n * a
    return num / (k * (k + 1) + 3 * n * k + 3 * n * n)


def eigenpair(E):
    lam = np.linalg.eigvalsh(np.asarray(E, dtype=float))
    return float(lam[0]), float(lam[1])


@dataclass(frozen=True)
class RegionSample:
    lambda1: float
    lambda2: float
    family: str
    mu: float | None = None
    k: int = 0
    n1: int = 0
    n2: int = 0
    n3: int = 0


def sample_region(a: float, resolution: int):
    """Eigenvalue pairs of still-state eigenstrains, with every point mirrored.

    Covers the homogeneous vertices, two-phase laminates, the delta-gamma arc,
    three-phase alpha-delta-gamma laminates and hexagon assemblies.
    """
    if not 1.0 <= a < 2.0:
        raise ParameterOutOfRange(f"a={a} outside [1, 2)")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    st = {nm: homogeneous_state(nm, a).eigenstrain for nm in STATE_NAMES}
    G = rotate_delta_to_tangent(a).G
    mus = np.linspace(0.0, 1.0, resolution)
    out = []

    def emit(E, family, **kw):
        l1, l2 = eigenpair(E)
        out.append(RegionSample(l1, l2, family, **kw))

    for nm in STATE_NAMES:
        emit(st[nm], f"vertex:{nm}")
    for x, y in (("alpha", "delta"), ("alpha", "gamma"), ("beta", "delta"), ("beta", "gamma")):
        for mu in mus:
            emit(mu * st[x] + (1 - mu) * st[y], f"{x}-{y}", mu=float(mu))
    for mu in mus:
        emit(mu * G + (1 - mu) * st["gamma"], "delta-gamma", mu=float(mu))
    for i, mu in enumerate(mus):
        for nu in mus[: resolution - i]:
            emit(nu * st["alpha"] + mu * G + (1 - mu - nu) * st["gamma"],
                 "alpha-delta-gamma", mu=float(mu))
    for k in range(1, resolution + 1):
        for n in range(1, resolution + 1):
            for n1, n2, n3 in ((n, n, n), (n, 1, 1), (n, n, 1)):
                E, _ = hex_assembly(k, n1, n2, n3, a)
                emit(E, "hex", k=k, n1=n1, n2=n2, n3=n3)
    mirrored = [
        RegionSample(p.lambda2, p.lambda1, p.family, p.mu, p.k, p.n1, p.n2, p.n3) for p in out
    ]
    return out + mirrored
