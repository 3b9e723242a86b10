"""2x2 unimodular matrices, the Möbius action on triples and the characters ψ, φ.

Value types are frozen dataclasses; every operation is a pure function, so the
module can be used from any number of worker threads.  Tolerances:

- determinant drift: ``|det - 1| <= DET_TOL * (1 + |g|^2)``; products are
  renormalized by ``g / sqrt(det g)`` once the drift exceeds half of it;
- Möbius pole: ``|cz + d| <= POLE_TOL * |g| * (1 + |z|)`` raises :class:`PoleError`;
- distinct triples: pairwise distance below ``DEGENERATE_TOL`` is degenerate.

The ``*_batch`` helpers evaluate the same formulas on stacked ``(n, 2, 2)``
complex arrays for the Monte-Carlo suites.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np

DET_TOL = 1e-10
POLE_TOL = 1e-14
DEGENERATE_TOL = 1e-9
THETA_SNAP = 1e-12


class DeterminantError(ValueError):
    """Raised when a matrix handed to :class:`UniMat2` is not unimodular."""

    def __init__(self, det: complex, norm_sq: float) -> None:
        super().__init__(
            f"det = {det!r} is not 1 within {DET_TOL:g} * (1 + |g|^2), |g|^2 = {norm_sq:g}"
        )
        self.det = det
        self.norm_sq = norm_sq


class PoleError(ArithmeticError):
    """Raised when z sits at (or numerically near) the pole of a Möbius map."""

    def __init__(
        self, z: complex, denominator: complex, index: Optional[int] = None
    ) -> None:
        where = "" if index is None else f" (component {index})"
        super().__init__(f"pole of the Möbius map at z = {z!r}{where}: cz+d = {denominator!r}")
        self.z = z
        self.denominator = denominator
        self.index = index


class DegenerateTriple(ValueError):
    """Raised when a triple has two (numerically) coinciding components."""

    def __init__(self, triple: "Triple", distance: float) -> None:
        super().__init__(
            f"triple {triple.as_tuple()!r} has coinciding components (distance {distance:g})"
        )
        self.triple = triple
        self.distance = distance


def _det_tolerance(norm_sq: float) -> float:
    return DET_TOL * (1.0 + norm_sq)


@dataclass(frozen=True)
class UniMat2:
    """A 2x2 complex matrix [[a, b], [c, d]] with ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise ValueError(f"matrix entry {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)
        if abs(self.det - 1.0) > _det_tolerance(self.norm_sq):
            raise DeterminantError(self.det, self.norm_sq)

    @classmethod
    def from_entries(cls, a: complex, b: complex, c: complex, d: complex) -> "UniMat2":
        """Build a unimodular matrix, rescaling by 1/sqrt(det) when det drifted."""
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        norm_sq = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2
        if det == 0:
            raise DeterminantError(det, norm_sq)
        if abs(det - 1.0) > 0.5 * _det_tolerance(norm_sq):
            root = cmath.sqrt(det)
            a, b, c, d = a / root, b / root, c / root, d / root
        return cls(a, b, c, d)

    @classmethod
    def from_array(cls, matrix: np.ndarray) -> "UniMat2":
        m = np.asarray(matrix, dtype=complex)
        return cls.from_entries(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "UniMat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def norm_sq(self) -> float:
        """Squared Euclidean norm |a|^2 + |b|^2 + |c|^2 + |d|^2."""
        return abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    def entries(self) -> Tuple[complex, complex, complex, complex]:
        return self.a, self.b, self.c, self.d

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def is_real(self, tol: float = 1e-12) -> bool:
        return all(abs(e.imag) <= tol * (1.0 + self.norm) for e in self.entries())

    def __neg__(self) -> "UniMat2":
        return UniMat2(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, other: "UniMat2") -> "UniMat2":
        return _product(self, other)


def _sign_normalized(g: UniMat2) -> UniMat2:
    # first entry of largest modulus gets argument in (-pi/2, pi/2]
    entries = g.entries()
    lead = entries[max(range(4), key=lambda i: abs(entries[i]))]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        return -g
    return g


@dataclass(frozen=True)
class ProjMat2:
    """An element {±g} of PSL(2, C), stored by its sign-normalized representative."""

    rep: UniMat2

    def __post_init__(self) -> None:
        object.__setattr__(self, "rep", _sign_normalized(self.rep))

    @classmethod
    def of(cls, g: Union[UniMat2, "ProjMat2"]) -> "ProjMat2":
        return g if isinstance(g, ProjMat2) else cls(g)

    @classmethod
    def identity(cls) -> "ProjMat2":
        return cls(UniMat2.identity())

    def as_array(self) -> np.ndarray:
        return self.rep.as_array()

    def __matmul__(self, other: "ProjMat2") -> "ProjMat2":
        return ProjMat2(_product(self.rep, other.rep))


Matrix = Union[UniMat2, ProjMat2]


def as_unimat(g: Matrix) -> UniMat2:
    return g.rep if isinstance(g, ProjMat2) else g


def normalize(g: Matrix) -> ProjMat2:
    return ProjMat2.of(g)


def projective_distance(g: Matrix, h: Matrix) -> float:
    """min(|g - h|, |g + h|): the distance between {±g} and {±h}."""
    m1, m2 = as_unimat(g).as_array(), as_unimat(h).as_array()
    return float(min(np.linalg.norm(m1 - m2), np.linalg.norm(m1 + m2)))


def _product(g1: UniMat2, g2: UniMat2) -> UniMat2:
    return UniMat2.from_entries(
        g1.a * g2.a + g1.b * g2.c,
        g1.a * g2.b + g1.b * g2.d,
        g1.c * g2.a + g1.d * g2.c,
        g1.c * g2.b + g1.d * g2.d,
    )


def mul(g1: Matrix, g2: Matrix) -> Matrix:
    """Group product; projective as soon as either factor is projective."""
    product = _product(as_unimat(g1), as_unimat(g2))
    if isinstance(g1, ProjMat2) or isinstance(g2, ProjMat2):
        return ProjMat2(product)
    return product


def inv(g: Matrix) -> Matrix:
    m = as_unimat(g)
    inverse = UniMat2(m.d, -m.b, -m.c, m.a)
    return ProjMat2(inverse) if isinstance(g, ProjMat2) else inverse


@dataclass(frozen=True)
class Sl2Element:
    """x E + y F + z H with E = [[0,1],[0,0]], F = [[0,0],[1,0]], H = [[1,0],[0,-1]]."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Sl2Element") -> "Sl2Element":
        return Sl2Element(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Sl2Element") -> "Sl2Element":
        return Sl2Element(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, scale: float) -> "Sl2Element":
        return Sl2Element(self.x * scale, self.y * scale, self.z * scale)

    __rmul__ = __mul__

    @property
    def discriminant(self) -> float:
        """z^2 + xy = -det; > 0 hyperbolic, 0 parabolic, < 0 elliptic (compact)."""
        return self.z * self.z + self.x * self.y

    def as_array(self) -> np.ndarray:
        return np.array([[self.z, self.x], [self.y, -self.z]], dtype=float)


E = Sl2Element(x=1.0)
F = Sl2Element(y=1.0)
H = Sl2Element(z=1.0)


def exp_sl2(X: Sl2Element, t: float = 1.0) -> UniMat2:
    """Closed-form exp(tX): (tX)^2 = q I with q = t^2 (z^2 + xy)."""
    q = X.discriminant * t * t
    if abs(q) < 1e-8:
        c0 = 1.0 + q / 2.0 + q * q / 24.0 + q**3 / 720.0
        c1 = 1.0 + q / 6.0 + q * q / 120.0 + q**3 / 5040.0
    elif q > 0:
        r = math.sqrt(q)
        c0, c1 = math.cosh(r), math.sinh(r) / r
    else:
        r = math.sqrt(-q)
        c0, c1 = math.cos(r), math.sin(r) / r
    a, b, c, d = c0 + c1 * t * X.z, c1 * t * X.x, c1 * t * X.y, c0 - c1 * t * X.z
    if q > 0:
        # the smaller diagonal entry cancels for large r; take it from det = 1
        if abs(a) >= abs(d):
            d = (1.0 + b * c) / a
        else:
            a = (1.0 + b * c) / d
    return UniMat2.from_entries(a, b, c, d)


def rotation(theta: float) -> UniMat2:
    """[[cos θ, -sin θ], [sin θ, cos θ]] = exp_sl2(F - E, θ)."""
    c, s = math.cos(theta), math.sin(theta)
    return UniMat2(c, -s, s, c)


def iwasawa(theta: float, s: float, u: float) -> UniMat2:
    """k(θ) · diag(e^s, e^-s) · [[1, u], [0, 1]]."""
    c, sn = math.cos(theta), math.sin(theta)
    es, ems = math.exp(s), math.exp(-s)
    return UniMat2.from_entries(
        c * es, c * es * u - sn * ems, sn * es, sn * es * u + c * ems
    )


def iwasawa_coordinates(g: Matrix, *, projective: bool = True) -> Tuple[float, float, float]:
    """Inverse of :func:`iwasawa` for real g; θ in [0, π) when projective."""
    m = as_unimat(g)
    if not m.is_real(1e-9):
        raise ValueError("Iwasawa coordinates need a real matrix")
    a, b, c, d = (e.real for e in m.entries())
    rho = math.hypot(a, c)
    theta = math.atan2(c, a)
    s = math.log(rho)
    u = (math.cos(theta) * b + math.sin(theta) * d) / rho
    if projective:
        # k(θ + π) = -k(θ); θ within rounding of π is the class of θ = 0
        if theta < 0:
            theta += math.pi
        if theta >= math.pi - THETA_SNAP:
            theta = max(theta - math.pi, 0.0)
    return theta, s, u


def mobius_apply(g: Matrix, z: complex) -> complex:
    """(az + b) / (cz + d); sign-independent for projective g."""
    m = as_unimat(g)
    z = complex(z)
    denominator = m.c * z + m.d
    if abs(denominator) <= POLE_TOL * m.norm * (1.0 + abs(z)):
        raise PoleError(z, denominator)
    return (m.a * z + m.b) / denominator


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point of the upper half-plane H = {Im z > 0}."""

    z: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", complex(self.z))
        if not self.z.imag > 0:
            raise ValueError(f"{self.z!r} is not in the upper half-plane")

    def moved_by(self, g: Matrix) -> "HalfPlanePoint":
        """Image under a real g; Im(gz) = Im z / |cz + d|^2."""
        if not as_unimat(g).is_real():
            raise ValueError("only real matrices preserve the upper half-plane")
        return HalfPlanePoint(mobius_apply(g, self.z))


@dataclass(frozen=True)
class Triple:
    """A point (z1, z2, z3) of C^3."""

    z1: complex
    z2: complex
    z3: complex

    def __post_init__(self) -> None:
        for name in ("z1", "z2", "z3"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "Triple":
        v = np.asarray(values, dtype=complex).reshape(3)
        return cls(v[0], v[1], v[2])

    def __iter__(self) -> Iterator[complex]:
        return iter((self.z1, self.z2, self.z3))

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return self.z1, self.z2, self.z3

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=complex)

    @property
    def norm_sq(self) -> float:
        return sum(abs(z) ** 2 for z in self)

    def min_pairwise_distance(self) -> float:
        z1, z2, z3 = self.as_tuple()
        return min(abs(z1 - z2), abs(z1 - z3), abs(z2 - z3))

    def is_distinct_halfplane(self, tol: float = DEGENERATE_TOL) -> bool:
        return all(z.imag > 0 for z in self) and self.min_pairwise_distance() > tol

    def require_distinct(self, tol: float = DEGENERATE_TOL) -> "Triple":
        distance = self.min_pairwise_distance()
        if distance < tol:
            raise DegenerateTriple(self, distance)
        return self


DEFAULT_ZETA = Triple(1j, 1 + 1j, 2j)


def act_triple(g: Matrix, t: Triple) -> Triple:
    """Componentwise Möbius action g(z1, z2, z3) = (g z1, g z2, g z3)."""
    images = []
    for index, z in enumerate(t):
        try:
            images.append(mobius_apply(g, z))
        except PoleError as exc:
            raise PoleError(exc.z, exc.denominator, index=index) from exc
    return Triple(*images)


def psi(g: Matrix) -> complex:
    """ψ(g) = (a + d) + i(c - b); odd under g -> -g."""
    m = as_unimat(g)
    return (m.a + m.d) + 1j * (m.c - m.b)


def phi_main(g: Matrix) -> complex:
    """φ(g) = ψ(g)^2 / 4, well defined on PSL(2, C)."""
    return psi(g) ** 2 / 4.0


def phi_prelim(g: Matrix) -> complex:
    """a + ic of the (canonical) representative; defined on SL(2, C) only."""
    m = as_unimat(g)
    return m.a + 1j * m.c


def phi_square(g: Matrix) -> complex:
    """(a + ic)^2, sign-independent."""
    return phi_prelim(g) ** 2


def big_phi(h: Matrix, zeta: Triple = DEFAULT_ZETA) -> Triple:
    """Φ(h) = h ζ; holomorphic, injective and G-equivariant."""
    zeta.require_distinct()
    return act_triple(h, zeta)


def _cross_ratio_matrix(t: Triple) -> np.ndarray:
    # sends z1 -> 0, z2 -> 1, z3 -> infinity
    z1, z2, z3 = t.as_tuple()
    return np.array(
        [[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]], dtype=complex
    )


def big_phi_inverse(z: Triple, zeta: Triple = DEFAULT_ZETA) -> ProjMat2:
    """The unique h in PSL(2, C) with h ζ = z, from cross-ratio matrices."""
    zeta.require_distinct()
    z.require_distinct()
    target = _cross_ratio_matrix(z)
    adjugate = np.array(
        [[target[1, 1], -target[0, 1]], [-target[1, 0], target[0, 0]]], dtype=complex
    )
    raw = adjugate @ _cross_ratio_matrix(zeta)
    det = raw[0, 0] * raw[1, 1] - raw[0, 1] * raw[1, 0]
    scale = float(np.sum(np.abs(raw) ** 2))
    if abs(det) < 1e-12 * scale:
        raise DegenerateTriple(z, z.min_pairwise_distance())
    return ProjMat2(UniMat2.from_array(raw / cmath.sqrt(det)))


def psi_batch(m: np.ndarray) -> np.ndarray:
    return (m[..., 0, 0] + m[..., 1, 1]) + 1j * (m[..., 1, 0] - m[..., 0, 1])


def phi_main_batch(m: np.ndarray) -> np.ndarray:
    return psi_batch(m) ** 2 / 4.0


def phi_prelim_batch(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] + 1j * m[..., 1, 0]


def det_batch(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def renormalize_batch(m: np.ndarray) -> np.ndarray:
    """Divide each matrix by sqrt(det) so that det = 1."""
    return m / np.sqrt(det_batch(m).astype(complex))[..., None, None]


def iwasawa_batch(theta: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
    c, sn = np.cos(theta), np.sin(theta)
    es, ems = np.exp(s), np.exp(-s)
    out = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    out[..., 0, 0] = c * es
    out[..., 0, 1] = c * es * u - sn * ems
    out[..., 1, 0] = sn * es
    out[..., 1, 1] = sn * es * u + c * ems
    return out


def mobius_batch(m: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Möbius action of stacked matrices on stacked points (no pole screening)."""
    return (m[..., 0, 0] * z + m[..., 0, 1]) / (m[..., 1, 0] * z + m[..., 1, 1])


__all__ = [
    "DEFAULT_ZETA",
    "DegenerateTriple",
    "DeterminantError",
    "E",
    "F",
    "H",
    "HalfPlanePoint",
    "PoleError",
    "ProjMat2",
    "Sl2Element",
    "Triple",
    "UniMat2",
    "act_triple",
    "big_phi",
    "big_phi_inverse",
    "exp_sl2",
    "inv",
    "iwasawa",
    "iwasawa_coordinates",
    "mobius_apply",
    "mul",
    "normalize",
    "phi_main",
    "phi_prelim",
    "phi_square",
    "projective_distance",
    "psi",
    "rotation",
]
