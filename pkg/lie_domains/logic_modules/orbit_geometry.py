"""Orbit geometry of the diagonal Möbius action of G = PSL(2, R) on H^3.

Tangent vectors come from the infinitesimal action: X = [[α, β], [γ, -α]]
moves a point w with velocity V_X(w) = β + 2αw - γw^2, so E, F, H give
1, -w^2 and 2w componentwise.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from ..data_access.models import VerificationReport, complexes_to_reals
from .mat_groups import (
    DEFAULT_ZETA,
    E,
    F,
    H,
    Matrix,
    Sl2Element,
    Triple,
    UniMat2,
    act_triple,
    as_unimat,
    exp_sl2,
    projective_distance,
)
from .samplers import sample_distinct_triples, sample_group_element

logger = logging.getLogger(__name__)

RANK_RATIO = 1e-6
ESCAPE_THRESHOLD = 1e-3
# a ray also counts as escaped once its score drops below this share of the start
ESCAPE_RELATIVE_DROP = 0.05


def vector_field(Y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Velocity of w under t -> exp(tY) for any 2x2 matrix Y (trace ignored)."""
    return Y[0, 1] + (Y[0, 0] - Y[1, 1]) * w - Y[1, 0] * w * w


@dataclass(frozen=True)
class OrbitFrame:
    """Base point and the orbit tangent vectors along E, F, H."""

    base: Triple
    generators: Tuple[np.ndarray, np.ndarray, np.ndarray] = field(compare=False)

    def real_tangent(self) -> np.ndarray:
        """6x3 real matrix of the generators in R^6 = (Re, Im)."""
        return np.column_stack([realify(v) for v in self.generators])


def realify(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


def complexify(x: np.ndarray) -> np.ndarray:
    half = len(x) // 2
    return np.asarray(x[:half], dtype=float) + 1j * np.asarray(x[half:], dtype=float)


def orbit_frame(base: Triple = DEFAULT_ZETA) -> OrbitFrame:
    w = base.as_array()
    generators = tuple(vector_field(X.as_array(), w) for X in (E, F, H))
    for v in generators:
        if not np.all(np.isfinite(v)):
            raise ValueError(f"orbit generators are not finite at {base!r}")
    return OrbitFrame(base=base, generators=generators)


def _frame_singular_values(frame: OrbitFrame) -> np.ndarray:
    vectors = list(frame.generators) + [1j * v for v in frame.generators]
    matrix = np.column_stack([realify(v) for v in vectors])
    return np.linalg.svd(matrix, compute_uv=False)


def totally_real_rank(frame: OrbitFrame) -> Tuple[float, bool]:
    """σ_min of [v1 v2 v3 iv1 iv2 iv3] in R^6 and whether it has full rank."""
    singular = _frame_singular_values(frame)
    sigma_min, sigma_max = float(singular[-1]), float(singular[0])
    return sigma_min, sigma_min > RANK_RATIO * sigma_max


def orbit_normals(frame: OrbitFrame) -> np.ndarray:
    """Orthonormal basis (6x3, real) of the Euclidean normal space of the orbit."""
    return null_space(frame.real_tangent().T)


def fixed_point_system(t: Triple) -> np.ndarray:
    """Rows [z, 1, -z^2, -z] of a z + b - z(c z + d) = 0 in the unknowns (a, b, c, d)."""
    return np.array([[z, 1.0, -z * z, -z] for z in t], dtype=complex)


def freeness_certificate(t: Triple) -> bool:
    """True when only scalar multiples of I fix all three components."""
    t.require_distinct()
    kernel = null_space(fixed_point_system(t))
    if kernel.shape[1] != 1:
        return False
    identity = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    return bool(abs(abs(np.vdot(identity, kernel[:, 0])) - 1.0) < 1e-9)


def check_totally_real(
    samples: int, seed: int = 0, *, base: Triple = DEFAULT_ZETA
) -> VerificationReport:
    """Full rank on random distinct triples, rank deficiency on repeated ones."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    triples = sample_distinct_triples(rng, samples)
    series: List[float] = []
    worst_ratio, witness = np.inf, None
    for row in [base.as_array(), *triples]:
        frame = orbit_frame(Triple.from_array(row))
        sigma_min, full = totally_real_rank(frame)
        singular = _frame_singular_values(frame)
        ratio = float(singular[-1] / max(singular[0], 1e-300))
        series.append(sigma_min)
        worst_ratio = min(worst_ratio, ratio)
        if not full and witness is None:
            witness = {"triple": complexes_to_reals(row), "sigma_min": sigma_min}

    repeated_max = 0.0
    for row in triples[: min(len(triples), 100)]:
        degenerate = Triple(row[0], row[0], row[2])
        sigma_min, _ = totally_real_rank(orbit_frame(degenerate))
        repeated_max = max(repeated_max, sigma_min)
        if sigma_min >= 1e-10 and witness is None:
            witness = {"repeated_triple": complexes_to_reals(degenerate), "sigma_min": sigma_min}

    return VerificationReport(
        name="totally_real_rank",
        passed=witness is None,
        samples=len(series),
        worst_margin=float(worst_ratio - RANK_RATIO),
        witness=witness,
        seed=seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={
            "min_sigma_ratio": float(worst_ratio),
            "repeated_component_max_sigma": repeated_max,
        },
        series=series,
    )


def check_freeness(
    samples: int,
    seed: int = 0,
    *,
    displacement_trials: int = 10_000,
    T: float = 5.0,
    N: float = 5.0,
    base: Triple = DEFAULT_ZETA,
) -> VerificationReport:
    """Nullspace span{I} on random triples; random g ≠ ±I visibly moves the base."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    witness = None
    triples = sample_distinct_triples(rng, samples)
    for row in triples:
        if not freeness_certificate(Triple.from_array(row)):
            witness = {"triple": complexes_to_reals(row)}
            break

    min_displacement = np.inf
    identity = UniMat2.identity()
    checked = 0
    for _ in range(displacement_trials):
        g = sample_group_element(rng, T, N)
        if projective_distance(g, identity) < 1e-6:
            continue
        moved = act_triple(g, base)
        displacement = max(abs(a - b) for a, b in zip(moved, base))
        checked += 1
        if displacement < min_displacement:
            min_displacement = displacement
        if displacement <= 1e-9 and witness is None:
            witness = {"g": complexes_to_reals(g.entries()), "displacement": displacement}

    return VerificationReport(
        name="freeness",
        passed=witness is None,
        samples=len(triples) + checked,
        worst_margin=float(min_displacement - 1e-9),
        witness=witness,
        seed=seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={
            "triples": len(triples),
            "displacement_trials": checked,
            "min_displacement": float(min_displacement),
        },
    )


def escape_score(t: Triple) -> float:
    """min(min Im z_i, min |z_i - z_j|) / (1 + |t|^2); 0 at the boundary or infinity."""
    closeness = min(min(z.imag for z in t), t.min_pairwise_distance())
    return closeness / (1.0 + t.norm_sq)


def classify(X: Sl2Element, tol: float = 1e-12) -> str:
    if X.discriminant > tol:
        return "hyperbolic"
    if X.discriminant < -tol:
        return "elliptic"
    return "parabolic"


@dataclass
class RayResult:
    X: Sl2Element
    kind: str
    scores: List[float]
    norms: List[float]

    @property
    def escaped(self) -> bool:
        first, last = self.scores[0], self.scores[-1]
        return self.strictly_escaped or last < ESCAPE_RELATIVE_DROP * first

    @property
    def strictly_escaped(self) -> bool:
        return self.scores[-1] < ESCAPE_THRESHOLD

    @property
    def monotone(self) -> bool:
        return all(b <= a * (1.0 + 1e-9) for a, b in zip(self.scores, self.scores[1:]))


def escape_ray(
    t: Triple,
    X: Sl2Element,
    g0: Optional[Matrix] = None,
    *,
    s_max: float = 12.0,
    steps: int = 24,
) -> RayResult:
    """Escape scores of exp(sX)·g0·t for s in [0, s_max]."""
    start = as_unimat(g0) if g0 is not None else UniMat2.identity()
    scores, norms = [], []
    for s in np.linspace(0.0, s_max, steps + 1):
        g = exp_sl2(X, float(s)) @ start
        scores.append(escape_score(act_triple(g, t)))
        norms.append(g.norm)
    return RayResult(X=X, kind=classify(X), scores=scores, norms=norms)


def _random_direction(rng: np.random.Generator) -> Sl2Element:
    x, y, z = rng.normal(size=3)
    X = Sl2Element(float(x), float(y), float(z))
    scale = abs(X.discriminant) ** -0.5 if abs(X.discriminant) > 1e-12 else 1.0
    return X * scale


def properness_probe(
    t: Triple = DEFAULT_ZETA,
    ray_count: int = 16,
    seed: int = 0,
    *,
    s_max: float = 12.0,
    rays: Optional[Sequence[Sl2Element]] = None,
) -> VerificationReport:
    """Sampled evidence that non-compact one-parameter rays leave every compact set.

    Elliptic rays are bounded and never flagged. The report is heuristic and
    does not enter the overall verdict.
    """
    t.require_distinct()
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    if rays is not None:
        directions = list(rays)
    else:
        directions = [_random_direction(rng) for _ in range(ray_count)]
    results = []
    for X in directions:
        g0 = sample_group_element(rng, 1.0, 1.0) if rays is None else None
        results.append(escape_ray(t, X, g0, s_max=s_max))

    stuck = [r for r in results if r.kind != "elliptic" and not r.escaped]
    wobbly = [r for r in results if r.kind != "elliptic" and not r.monotone]
    witness = None
    if stuck:
        ray = stuck[0]
        witness = {
            "X": [ray.X.x, ray.X.y, ray.X.z],
            "kind": ray.kind,
            "final_score": ray.scores[-1],
        }
    if wobbly:
        logger.info("properness probe | non-monotone rays=%s", len(wobbly))
    finals = [r.scores[-1] for r in results if r.kind != "elliptic"]
    return VerificationReport(
        name="properness_probe",
        passed=not stuck,
        samples=len(results),
        worst_margin=float(ESCAPE_THRESHOLD - max(finals)) if finals else None,
        witness=witness,
        seed=seed,
        heuristic=True,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={
            "kinds": {
                kind: sum(r.kind == kind for r in results)
                for kind in ("hyperbolic", "parabolic", "elliptic")
            },
            "non_monotone": [[r.X.x, r.X.y, r.X.z] for r in wobbly],
            "escape_rule": (
                f"final score < {ESCAPE_THRESHOLD:g} or final score < "
                f"{ESCAPE_RELATIVE_DROP:g} x initial score"
            ),
            "strict_escapes": sum(
                r.strictly_escaped for r in results if r.kind != "elliptic"
            ),
            "relative_only_escapes": sum(
                r.escaped and not r.strictly_escaped
                for r in results
                if r.kind != "elliptic"
            ),
            "s_max": s_max,
        },
        series=[r.scores[-1] for r in results],
    )


__all__ = [
    "OrbitFrame",
    "RayResult",
    "check_freeness",
    "check_totally_real",
    "classify",
    "complexify",
    "escape_ray",
    "escape_score",
    "fixed_point_system",
    "freeness_certificate",
    "orbit_frame",
    "orbit_normals",
    "properness_probe",
    "realify",
    "totally_real_rank",
    "vector_field",
]
