"""Heisenberg 商群 G = R×R×T 在 G^c = C×C×C* 上的作用与有界化映射。

The group law is (a, b, c)(x, y, z) = (a + x, b + y, c z e^{iay}).  For the
invariant domain Ω = G·U, U = {|x| < 1, |y| < 1, |z| < 2}, a point
(u, v, w) lies in Ω iff |Im u| < 1, |Im v| < 1 and

    log|w| < log 2 - Re u·Im v + sqrt(1 - (Im u)^2)·|Im v|,

the right-hand side being the supremum of log 2 - a·Im v over the admissible
a.  The map w' = w + 2C e^{u^2} with C = 2e^{13/4} keeps |w'| > 1, and
(u, v, w) -> (σ(u), σ(v), 1/w') with σ(t) = tanh(πt/4) embeds Ω into the
unit polydisc.
"""

from __future__ import annotations

import cmath
import logging
import math
import time
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from ..data_access.models import VerificationReport, complexes_to_reals
from ..utils.partition import ChunkOutcome, run_partitioned
from ..utils.settings import get_verify_config
from .mat_groups import Triple
from .orbit_geometry import OrbitFrame, totally_real_rank
from .samplers import sample_disc, sample_heis_omega

logger = logging.getLogger(__name__)

C_MIN = 2.0 * math.exp(13.0 / 4.0)
Z_FLOOR = 1e-300
BRUTE_STEP = 1e-3


class NotInOmega(ValueError):
    def __init__(self, point: "HeisCPoint") -> None:
        super().__init__(f"{point!r} is not in the invariant domain Ω = G·U")
        self.point = point


@dataclass(frozen=True)
class HeisElement:
    """(a, b, c) in R × R × T."""

    a: float
    b: float
    c: complex = 1.0

    def __post_init__(self) -> None:
        c = complex(self.c)
        if abs(abs(c) - 1.0) > 1e-12:
            raise ValueError(f"c must lie on the unit circle, |c| = {abs(c)!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", c / abs(c))

    @classmethod
    def identity(cls) -> "HeisElement":
        return cls(0.0, 0.0, 1.0)

    def as_point(self) -> "HeisCPoint":
        return HeisCPoint(self.a, self.b, self.c)


@dataclass(frozen=True)
class HeisCPoint:
    """(x, y, z) in C × C × C*."""

    x: complex
    y: complex
    z: complex

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.z) <= Z_FLOOR:
            raise ValueError("the third coordinate must be nonzero")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=complex)


@dataclass(frozen=True)
class BoundingConstant:
    C: float

    def __post_init__(self) -> None:
        if self.C < C_MIN * (1.0 - 1e-15):
            raise ValueError(f"C = {self.C!r} is below the sufficient value 2e^(13/4)")


def heis_mul(g: HeisElement, p: HeisCPoint) -> HeisCPoint:
    return HeisCPoint(g.a + p.x, g.b + p.y, g.c * p.z * cmath.exp(1j * g.a * p.y))


def heis_compose(g: HeisElement, h: HeisElement) -> HeisElement:
    return HeisElement(g.a + h.a, g.b + h.b, g.c * h.c * cmath.exp(1j * g.a * h.b))


def heis_inverse(g: HeisElement) -> HeisElement:
    return HeisElement(-g.a, -g.b, g.c.conjugate() * cmath.exp(1j * g.a * g.b))


def in_U(p: HeisCPoint) -> bool:
    return abs(p.x) < 1.0 and abs(p.y) < 1.0 and abs(p.z) < 2.0


def omega_margins(u: complex, v: complex, w: complex) -> Tuple[float, float, float]:
    """(1 - |Im u|, 1 - |Im v|, log-modulus slack); inside Ω iff all three are > 0."""
    slack_u = 1.0 - abs(u.imag)
    slack_v = 1.0 - abs(v.imag)
    if slack_u <= 0.0:
        return slack_u, slack_v, -math.inf
    s = math.sqrt(1.0 - u.imag**2)
    slack_w = math.log(2.0) - math.log(abs(w)) - u.real * v.imag + s * abs(v.imag)
    return slack_u, slack_v, slack_w


class OmegaMembership(NamedTuple):
    inside: bool
    g: Optional[HeisElement] = None
    base: Optional[HeisCPoint] = None


def omega_membership(p: HeisCPoint) -> OmegaMembership:
    """Closed-form test for p in Ω, with p = g·q, q in U, reconstructed when true."""
    u, v, w = p.x, p.y, p.z
    if min(omega_margins(u, v, w)) <= 0.0:
        return OmegaMembership(False)
    s = math.sqrt(1.0 - u.imag**2)
    lo, hi = u.real - s, u.real + s
    if v.imag != 0.0:
        # a·Im v < log(2/|w|)
        cut = math.log(2.0 / abs(w)) / v.imag
        if v.imag > 0:
            hi = min(hi, cut)
        else:
            lo = max(lo, cut)
    a = 0.5 * (lo + hi)
    b = v.real
    c = w / abs(w)
    g = HeisElement(a, b, c)
    base = HeisCPoint(u - a, 1j * v.imag, abs(w) * math.exp(a * v.imag))
    return OmegaMembership(True, g, base)


def omega_membership_bruteforce(p: HeisCPoint, step: float = BRUTE_STEP) -> bool:
    """Grid search over a in [Re u - 1, Re u + 1] with b = Re v and c cancelling the phase."""
    u, v, w = p.x, p.y, p.z
    if abs(v.imag) >= 1.0:
        return False
    a = np.arange(u.real - 1.0, u.real + 1.0 + step / 2.0, step)
    x_ok = np.abs(u - a) < 1.0
    z_ok = abs(w) * np.exp(a * v.imag) < 2.0
    return bool(np.any(x_ok & z_ok))


def derive_C(grid_points: int = 100_001) -> BoundingConstant:
    """C = 2e^{13/4}: the maximum of 2e^{t + 3 - t^2} over t >= 0, attained at t = 1/2.

    |w| < 2e^{|a|} <= 2e^{|Re u| + 2} and |e^{u^2}| >= e^{(Re u)^2 - 1}.  The
    grid confirms the closed form; the second inequality 2C - C >= C holds
    for every C, so no increase is needed.
    """
    t = np.linspace(0.0, 10.0, grid_points)
    grid_max = float(np.max(2.0 * np.exp(t + 3.0 - t * t)))
    if grid_max > C_MIN * (1.0 + 1e-12):
        raise ArithmeticError(f"grid maximum {grid_max!r} exceeds the closed form {C_MIN!r}")
    return BoundingConstant(C_MIN)


def _require_omega(p: HeisCPoint) -> None:
    if not omega_membership(p).inside:
        raise NotInOmega(p)


def bounding_map(p: HeisCPoint, C: BoundingConstant) -> HeisCPoint:
    """(u, v, w) -> (u, v, w + 2C e^{u^2}); |w'| > C|e^{u^2}| > 1 on Ω."""
    _require_omega(p)
    return HeisCPoint(p.x, p.y, p.z + 2.0 * C.C * cmath.exp(p.x * p.x))


def sigma(t: complex) -> complex:
    """Strip |Im t| < 1 onto the unit disc."""
    return cmath.tanh(math.pi * t / 4.0)


def sigma_inverse(q: complex) -> complex:
    return 4.0 / math.pi * cmath.atanh(q)


def bounded_embedding(p: HeisCPoint, C: BoundingConstant) -> np.ndarray:
    mapped = bounding_map(p, C)
    return np.array([sigma(mapped.x), sigma(mapped.y), 1.0 / mapped.z], dtype=complex)


def embedding_inverse(q: np.ndarray, C: BoundingConstant) -> HeisCPoint:
    u = sigma_inverse(complex(q[0]))
    v = sigma_inverse(complex(q[1]))
    w = 1.0 / complex(q[2]) - 2.0 * C.C * cmath.exp(u * u)
    return HeisCPoint(u, v, w)


def heis_orbit_frame(p: HeisCPoint) -> OrbitFrame:
    """Tangent vectors of the a-, b- and arg c-flows at p."""
    generators = (
        np.array([1.0, 0.0, 1j * p.y * p.z], dtype=complex),
        np.array([0.0, 1.0, 0.0], dtype=complex),
        np.array([0.0, 0.0, 1j * p.z], dtype=complex),
    )
    return OrbitFrame(base=Triple(p.x, p.y, p.z), generators=generators)


def cauchy_riemann_residual(p: HeisCPoint, C: BoundingConstant, h: float = 1e-6) -> float:
    """Relative mismatch of ∂/∂x and -i∂/∂y of w'(u, v, w) in each variable."""
    worst = 0.0
    base = np.array([p.x, p.y, p.z], dtype=complex)

    def w_prime(q: np.ndarray) -> complex:
        return q[2] + 2.0 * C.C * cmath.exp(q[0] * q[0])

    f0 = w_prime(base)
    for j in range(3):
        e = np.zeros(3, dtype=complex)
        # w' is affine in w; a step proportional to |w'| keeps the difference above rounding
        e[j] = h * max(1.0, abs(f0)) if j == 2 else h
        step = abs(e[j])
        d_x = (w_prime(base + e) - w_prime(base - e)) / (2.0 * step)
        d_y = (w_prime(base + 1j * e) - w_prime(base - 1j * e)) / (2.0 * step)
        scale = max(abs(d_x), 1.0)
        worst = max(worst, abs(d_x + 1j * d_y) / scale)
    return worst


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def _random_box_point(rng: np.random.Generator, a_range: float, b_range: float) -> HeisCPoint:
    u = complex(rng.uniform(-a_range - 1.0, a_range + 1.0), rng.uniform(-1.2, 1.2))
    v = complex(rng.uniform(-b_range - 1.0, b_range + 1.0), rng.uniform(-1.2, 1.2))
    modulus = math.exp(rng.uniform(-4.0, 4.0))
    w = modulus * cmath.exp(2j * math.pi * rng.uniform())
    return HeisCPoint(u, v, w)


def membership_audit(
    points: int,
    seed: int = 0,
    *,
    a_range: float = 3.0,
    b_range: float = 3.0,
    band: float = 2.0 * BRUTE_STEP,
) -> VerificationReport:
    """Closed form vs brute force off the boundary band, and G-invariance of Ω."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    disagreements = in_band = 0
    witness = None
    inside_count = 0
    for _ in range(points):
        p = _random_box_point(rng, a_range, b_range)
        closed = omega_membership(p).inside
        inside_count += closed
        if closed == omega_membership_bruteforce(p):
            continue
        if min(abs(m) for m in omega_margins(p.x, p.y, p.z)) < band:
            in_band += 1
            continue
        disagreements += 1
        if witness is None:
            witness = {"point": complexes_to_reals(p.as_array()), "closed_form": closed}

    u, v, w = sample_heis_omega(rng, points, a_range, b_range)
    invariance_failures = 0
    for i in range(points):
        g = HeisElement(
            rng.uniform(-a_range, a_range),
            rng.uniform(-b_range, b_range),
            cmath.exp(2j * math.pi * rng.uniform()),
        )
        p = HeisCPoint(u[i], v[i], w[i])
        if not omega_membership(p).inside or not omega_membership(heis_mul(g, p)).inside:
            invariance_failures += 1
            if witness is None:
                witness = {
                    "point": complexes_to_reals(p.as_array()),
                    "g": [g.a, g.b, g.c.real, g.c.imag],
                }

    return VerificationReport(
        name="heisenberg_membership",
        passed=witness is None,
        samples=2 * points,
        worst_margin=float(-disagreements - invariance_failures),
        witness=witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "inside_fraction": inside_count / points,
            "band_disagreements": in_band,
            "disagreements": disagreements,
            "invariance_failures": invariance_failures,
        },
    )


def constant_audit(
    samples: int,
    seed: int = 0,
    *,
    C: Optional[BoundingConstant] = None,
    a_range: float = 3.0,
    b_range: float = 3.0,
    workers: int = 1,
    chunk_size: Optional[int] = None,
    series_cap: Optional[int] = None,
) -> VerificationReport:
    """max |w| / |e^{u^2}| over Ω samples stays below C."""
    C = C or derive_C()
    chunk_size = chunk_size or get_verify_config().sampling.chunk_size
    started = time.perf_counter()

    def kernel(rng: np.random.Generator, count: int) -> ChunkOutcome:
        u, v, w = sample_heis_omega(rng, count, a_range, b_range)
        ratio = np.abs(w) * np.exp(-(u * u).real)
        bad = ratio >= C.C
        outcome = ChunkOutcome(samples=count, violations=int(bad.sum()))
        outcome.worst_margin = float(C.C - ratio.max())
        outcome.note_max("ratio", ratio.max())
        outcome.series = ratio[: series_cap or 0].tolist()
        if outcome.violations:
            first = int(np.flatnonzero(bad)[0])
            outcome.witness = {
                "point": complexes_to_reals((u[first], v[first], w[first])),
                "ratio": float(ratio[first]),
            }
        return outcome

    merged = run_partitioned(
        kernel,
        seed=seed,
        trials=samples,
        chunk_size=chunk_size,
        workers=workers,
        series_cap=series_cap,
    )
    return VerificationReport(
        name="heisenberg_constant",
        passed=merged.violations == 0,
        samples=merged.samples,
        worst_margin=merged.worst_margin,
        witness=merged.witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "C": C.C,
            "max_ratio": merged.maxima.get("ratio"),
            "violations": merged.violations,
        },
        series=merged.series,
    )


def embedding_audit(
    samples: int,
    seed: int = 0,
    *,
    C: Optional[BoundingConstant] = None,
    a_range: float = 3.0,
    b_range: float = 3.0,
    injectivity_pairs: int = 10_000,
    cr_points: int = 100,
) -> VerificationReport:
    """|w'| > C|e^{u^2}| > 1, image in the open unit polydisc, round trip, injectivity."""
    C = C or derive_C()
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    u, v, w = sample_heis_omega(rng, samples, a_range, b_range)

    lift = 2.0 * C.C * np.exp(u * u)
    w_prime = w + lift
    lower = C.C * np.abs(np.exp(u * u))
    bound_bad = ~((np.abs(w_prime) > lower) & (lower > 1.0))
    q = np.stack([np.tanh(np.pi * u / 4.0), np.tanh(np.pi * v / 4.0), 1.0 / w_prime], axis=1)
    modulus_bad = np.max(np.abs(q), axis=1) >= 1.0

    u_back = 4.0 / np.pi * np.arctanh(q[:, 0])
    v_back = 4.0 / np.pi * np.arctanh(q[:, 1])
    w_back = 1.0 / q[:, 2] - 2.0 * C.C * np.exp(u_back * u_back)
    uv_error = np.maximum(np.abs(u_back - u), np.abs(v_back - v))
    w_error = np.abs(w_back - w)
    round_trip_abs = np.maximum(uv_error, w_error)
    # w is recovered next to the large shift 2C e^{u^2}; the verdict uses |w'|-relative error
    round_trip = np.maximum(uv_error, w_error / np.abs(w_prime))

    pairs = min(injectivity_pairs, samples // 2)
    if pairs:
        separation = np.min(np.max(np.abs(q[:pairs] - q[pairs : 2 * pairs]), axis=1))
    else:
        separation = math.inf

    cr_worst = 0.0
    for i in range(min(cr_points, samples)):
        cr_worst = max(cr_worst, cauchy_riemann_residual(HeisCPoint(u[i], v[i], w[i]), C))

    witness = None
    bad = bound_bad | modulus_bad | (round_trip >= 1e-9)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        witness = {
            "point": complexes_to_reals((u[first], v[first], w[first])),
            "abs_w_prime": float(abs(w_prime[first])),
            "image_max_modulus": float(np.max(np.abs(q[first]))),
            "round_trip_error": float(round_trip[first]),
            "round_trip_abs_error": float(round_trip_abs[first]),
        }
    elif separation <= 1e-12 or cr_worst >= 1e-6:
        witness = {"min_pair_separation": float(separation), "cauchy_riemann_residual": cr_worst}

    return VerificationReport(
        name="heisenberg_embedding",
        passed=witness is None,
        samples=samples,
        worst_margin=float(1.0 - np.max(np.abs(q))),
        witness=witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "C": C.C,
            "min_abs_w_prime": float(np.min(np.abs(w_prime))),
            "max_image_modulus": float(np.max(np.abs(q))),
            "max_round_trip_error": float(np.max(round_trip)),
            "max_round_trip_abs_error": float(np.max(round_trip_abs)),
            "round_trip_rule": "max(|du|, |dv|, |dw| / |w'|) < 1e-9",
            "min_pair_separation": float(separation),
            "max_cauchy_riemann_residual": cr_worst,
            "bound_violations": int(bound_bad.sum()),
        },
        series=np.abs(w_prime[: min(samples, 10_000)]).tolist(),
    )


def orbit_rank_audit(points: int, seed: int = 0) -> VerificationReport:
    """The three orbit generators and their i-multiples span R^6 at random points."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    xs, ys = sample_disc(rng, points, 3.0), sample_disc(rng, points, 3.0)
    zs = sample_disc(rng, points, 3.0)
    worst, witness = math.inf, None
    for x, y, z in zip(xs, ys, zs):
        if abs(z) < 1e-6:
            continue
        sigma_min, full = totally_real_rank(heis_orbit_frame(HeisCPoint(x, y, z)))
        worst = min(worst, sigma_min)
        if not full and witness is None:
            witness = {"point": complexes_to_reals((x, y, z)), "sigma_min": sigma_min}
    return VerificationReport(
        name="heisenberg_totally_real",
        passed=witness is None,
        samples=points,
        worst_margin=float(worst),
        witness=witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
    )


__all__ = [
    "BoundingConstant",
    "C_MIN",
    "HeisCPoint",
    "HeisElement",
    "NotInOmega",
    "OmegaMembership",
    "bounded_embedding",
    "bounding_map",
    "cauchy_riemann_residual",
    "constant_audit",
    "derive_C",
    "embedding_audit",
    "embedding_inverse",
    "heis_compose",
    "heis_inverse",
    "heis_mul",
    "heis_orbit_frame",
    "in_U",
    "membership_audit",
    "omega_margins",
    "omega_membership",
    "omega_membership_bruteforce",
    "orbit_rank_audit",
    "sigma",
    "sigma_inverse",
]
