"""Tubular neighbourhoods of the orbit G·ζ and their Levi form.

Distance to the orbit is minimized over Iwasawa coordinates (θ, s, u) with
``scipy.optimize.least_squares`` on the six real residuals of g(θ, s, u)·ζ - x.
The Jacobian is analytic: ∂θ, ∂s and ∂u of g·ζ are the velocity fields of
F - E, k H k⁻¹ and (ka) E (ka)⁻¹ at the current point.

The Levi form of a real function ρ on C^n is built from its real Hessian by
central differences, ρ_{j k̄} = ¼(ρ_{x_j x_k} + ρ_{y_j y_k} + i(ρ_{x_j y_k} - ρ_{y_j x_k})),
and restricted to the complex tangent space {v : Σ ∂ρ/∂z_j v_j = 0}.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import least_squares

from ..data_access.models import VerificationReport, complexes_to_reals
from ..utils.settings import get_verify_config
from .mat_groups import (
    DEFAULT_ZETA,
    Triple,
    UniMat2,
    act_triple,
    big_phi_inverse,
    iwasawa,
    iwasawa_coordinates,
    rotation,
)
from .orbit_geometry import complexify, orbit_frame, orbit_normals, realify, vector_field
from .samplers import sample_group_element

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-6
RICHARDSON_TOL = 0.05
SOLVER_TOL = 1e-14

_F_MINUS_E = np.array([[0.0, -1.0], [1.0, 0.0]])
_H = np.array([[1.0, 0.0], [0.0, -1.0]])
_E = np.array([[0.0, 1.0], [0.0, 0.0]])


class ConvergenceFailure(RuntimeError):
    """Fewer than two multistart runs agree on the orbit distance."""

    def __init__(self, point: np.ndarray, distances: Sequence[float]) -> None:
        super().__init__(
            f"orbit distance did not converge at {np.round(point, 6)!r}: "
            f"starts gave {sorted(distances)!r}"
        )
        self.point = point
        self.distances = list(distances)


@dataclass(frozen=True)
class TubeSpec:
    """{x : dist(x, G·ζ) < radius}, kept inside the distinct-triple region."""

    base: Triple = DEFAULT_ZETA
    radius: float = 0.05

    def __post_init__(self) -> None:
        limit = 0.5 * self.base.min_pairwise_distance()
        if not 0.0 < self.radius < limit:
            raise ValueError(f"tube radius must lie in (0, {limit:g}), got {self.radius!r}")


@dataclass(frozen=True)
class TubeDistance:
    distance: float
    squared: float
    params: Tuple[float, float, float]
    agreeing_starts: int


def orbit_point(params: Sequence[float], base: Triple = DEFAULT_ZETA) -> np.ndarray:
    theta, s, u = (float(p) for p in params)
    return act_triple(iwasawa(theta, s, u), base).as_array()


def orbit_jacobian(params: Sequence[float], base: Triple = DEFAULT_ZETA) -> np.ndarray:
    """6x3 real Jacobian of (θ, s, u) -> realify(g(θ, s, u)·ζ)."""
    theta, s, u = (float(p) for p in params)
    w = orbit_point(params, base)
    k = rotation(theta).as_array().real
    ka = k @ np.diag([math.exp(s), math.exp(-s)])
    d_theta = vector_field(_F_MINUS_E, w)
    d_s = vector_field(k @ _H @ np.linalg.inv(k), w)
    d_u = vector_field(ka @ _E @ np.linalg.inv(ka), w)
    return np.column_stack([realify(d_theta), realify(d_s), realify(d_u)])


def _anchor(target: np.ndarray, base: Triple) -> np.ndarray:
    """Iwasawa coordinates of the real part of Φ⁻¹(x), or the origin."""
    try:
        h = big_phi_inverse(Triple.from_array(target), base).rep.as_array()
    except ValueError:
        return np.zeros(3)
    real = h.real
    det = float(np.linalg.det(real))
    if det <= 1e-12:
        return np.zeros(3)
    return np.array(iwasawa_coordinates(UniMat2.from_array(real / math.sqrt(det))))


def tube_distance(
    x: Union[Triple, np.ndarray],
    spec: TubeSpec,
    *,
    starts: Optional[int] = None,
    seed: int = 0,
    warm_start: Optional[Sequence[float]] = None,
) -> TubeDistance:
    """Euclidean distance from x in C^3 to the orbit G·ζ and the minimizing (θ, s, u).

    With ``warm_start`` a single local descent is run from those coordinates;
    otherwise a deterministic multistart around the anchor is used and at least
    two starts must agree within 1e-6.
    """
    target = x.as_array() if isinstance(x, Triple) else np.asarray(x, dtype=complex)
    base = spec.base

    def residual(p: np.ndarray) -> np.ndarray:
        return realify(orbit_point(p, base) - target)

    def jacobian(p: np.ndarray) -> np.ndarray:
        return orbit_jacobian(p, base)

    if warm_start is not None:
        candidates = [np.asarray(warm_start, dtype=float)]
    else:
        count = starts or get_verify_config().tube.starts
        anchor = _anchor(target, base)
        rng = np.random.default_rng(seed)
        candidates = [anchor] + [anchor + rng.normal(scale=0.3, size=3) for _ in range(count - 1)]

    runs: List[Tuple[float, np.ndarray]] = []
    for x0 in candidates:
        sol = least_squares(
            residual,
            x0,
            jac=jacobian,
            method="lm",
            xtol=SOLVER_TOL,
            ftol=SOLVER_TOL,
            gtol=SOLVER_TOL,
        )
        runs.append((float(np.dot(sol.fun, sol.fun)), sol.x))

    squared, best = min(runs, key=lambda run: run[0])
    distance = math.sqrt(squared)
    agreeing = sum(abs(math.sqrt(sq) - distance) <= AGREEMENT_TOL for sq, _ in runs)
    if warm_start is None and agreeing < 2:
        distances = [math.sqrt(sq) for sq, _ in runs]
        logger.warning("orbit distance multistart disagreement | distances=%s", distances)
        raise ConvergenceFailure(target, distances)
    if warm_start is None and distance > 2.0 * spec.radius:
        logger.debug("point outside twice the tube radius | distance=%.6g", distance)
    theta, s, u = (float(v) for v in best)
    return TubeDistance(
        distance=distance,
        squared=squared,
        params=(theta % math.pi, s, u),
        agreeing_starts=agreeing,
    )


def _real_derivatives(
    rho: Callable[[np.ndarray], float], p: np.ndarray, step: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient and Hessian of x -> rho(complexify(x)) at realify(p)."""
    x0 = realify(p)
    n = len(x0)

    def f(x: np.ndarray) -> float:
        return float(rho(complexify(x)))

    f0 = f(x0)
    eye = np.eye(n) * step
    plus = np.array([f(x0 + eye[a]) for a in range(n)])
    minus = np.array([f(x0 - eye[a]) for a in range(n)])
    gradient = (plus - minus) / (2.0 * step)
    hessian = np.diag((plus - 2.0 * f0 + minus) / step**2)
    for a in range(n):
        for b in range(a + 1, n):
            value = (
                f(x0 + eye[a] + eye[b])
                - f(x0 + eye[a] - eye[b])
                - f(x0 - eye[a] + eye[b])
                + f(x0 - eye[a] - eye[b])
            ) / (4.0 * step**2)
            hessian[a, b] = hessian[b, a] = value
    return gradient, hessian


def _complex_from_real(hessian: np.ndarray) -> np.ndarray:
    n = hessian.shape[0] // 2
    xx, yy = hessian[:n, :n], hessian[n:, n:]
    xy, yx = hessian[:n, n:], hessian[n:, :n]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def complex_hessian(
    rho: Callable[[np.ndarray], float], p: np.ndarray, step: float = 1e-4
) -> np.ndarray:
    """Matrix [ρ_{j k̄}] at p (Hermitian, n x n)."""
    _, hessian = _real_derivatives(rho, np.asarray(p, dtype=complex), step)
    return _complex_from_real(hessian)


@dataclass(frozen=True)
class LeviForm:
    eigenvalues: np.ndarray
    gradient_norm: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def normalized_min(self) -> float:
        """Minimum eigenvalue divided by |∇ρ|, independent of the scaling of ρ."""
        return self.min_eigenvalue / self.gradient_norm


def levi_form(rho: Callable[[np.ndarray], float], p: np.ndarray, step: float = 1e-4) -> LeviForm:
    """Eigenvalues (ascending) of the complex Hessian on the complex tangent space at p."""
    p = np.asarray(p, dtype=complex)
    gradient, hessian = _real_derivatives(rho, p, step)
    n = len(p)
    d_rho = 0.5 * (gradient[:n] - 1j * gradient[n:])
    gradient_norm = float(np.linalg.norm(gradient))
    if gradient_norm == 0.0:
        raise ValueError("ρ has a critical point at p; no hypersurface there")
    basis = null_space(d_rho[None, :])
    levi = basis.T @ _complex_from_real(hessian) @ basis.conj()
    levi = 0.5 * (levi + levi.conj().T)
    return LeviForm(eigenvalues=np.linalg.eigvalsh(levi), gradient_norm=gradient_norm)


def tube_defining_function(
    spec: TubeSpec, warm_start: Sequence[float]
) -> Callable[[np.ndarray], float]:
    """ρ = dist^2 - radius^2, each evaluation warm-started at ``warm_start``."""

    def rho(q: np.ndarray) -> float:
        return tube_distance(q, spec, warm_start=warm_start).squared - spec.radius**2

    return rho


def boundary_point(
    spec: TubeSpec, g: UniMat2, direction: np.ndarray
) -> Tuple[np.ndarray, Tuple[float, float, float]]:
    """g·ζ + radius·n̂ with n̂ the unit normal given by ``direction`` in the normal basis."""
    center = act_triple(g, spec.base)
    normals = orbit_normals(orbit_frame(center))
    normal = normals @ np.asarray(direction, dtype=float)
    normal /= np.linalg.norm(normal)
    return center.as_array() + spec.radius * complexify(normal), iwasawa_coordinates(g)


def levi_form_check(
    spec: TubeSpec,
    boundary_samples: int,
    seed: int = 0,
    *,
    step: Optional[float] = None,
    T: Optional[float] = None,
    N: Optional[float] = None,
) -> VerificationReport:
    """Positivity of the Levi form at sampled boundary points of the orbit tube."""
    cfg = get_verify_config().tube
    step = step or cfg.fd_step
    T = T if T is not None else cfg.levi_T
    N = N if N is not None else cfg.levi_N
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    logger.info(
        "levi check start | radius=%.4g | samples=%s | step=%.1e | seed=%s",
        spec.radius,
        boundary_samples,
        step,
        seed,
    )

    eigenvalues: List[float] = []
    normalized: List[float] = []
    disagreements = 0
    max_level_residual = 0.0
    witness = None
    for index in range(boundary_samples):
        g = sample_group_element(rng, T, N)
        point, params = boundary_point(spec, g, rng.normal(size=3))
        located = tube_distance(point, spec, seed=index)
        max_level_residual = max(max_level_residual, abs(located.distance - spec.radius))
        rho = tube_defining_function(spec, located.params)
        fine = levi_form(rho, point, step)
        coarse = levi_form(rho, point, 2.0 * step)
        lam = fine.min_eigenvalue
        eigenvalues.append(lam)
        normalized.append(fine.normalized_min)
        agree = abs(lam - coarse.min_eigenvalue) <= RICHARDSON_TOL * abs(lam)
        if not agree:
            disagreements += 1
        if (lam <= 0.0 or not agree) and witness is None:
            witness = {
                "point": complexes_to_reals(point),
                "orbit_params": list(params),
                "min_eigenvalue": lam,
                "min_eigenvalue_2h": coarse.min_eigenvalue,
            }
            logger.warning(
                "levi check failure | index=%s | lambda=%.6g | lambda_2h=%.6g",
                index,
                lam,
                coarse.min_eigenvalue,
            )

    passed = witness is None
    return VerificationReport(
        name="levi_form",
        passed=passed,
        samples=boundary_samples,
        worst_margin=float(min(eigenvalues)),
        witness=witness,
        seed=seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={
            "radius": spec.radius,
            "fd_step": step,
            "min_eigenvalue": float(min(eigenvalues)),
            "min_normalized_eigenvalue": float(min(normalized)),
            "richardson_disagreements": disagreements,
            "max_boundary_distance_error": max_level_residual,
        },
        series=eigenvalues,
    )


def levi_radius_probe(
    base: Triple = DEFAULT_ZETA,
    radii: Sequence[float] = (0.1, 0.05, 0.025),
    *,
    step: Optional[float] = None,
    seed: int = 0,
) -> VerificationReport:
    """Normalized minimum Levi eigenvalue at a fixed boundary direction, expected ~ 1/radius."""
    step = step or get_verify_config().tube.fd_step
    started = time.perf_counter()
    direction = np.array([1.0, 0.0, 0.0])
    values = []
    for radius in radii:
        spec = TubeSpec(base=base, radius=radius)
        point, params = boundary_point(spec, UniMat2.identity(), direction)
        form = levi_form(tube_defining_function(spec, params), point, step)
        values.append(form.normalized_min)
    ratios = [
        (v_next / v) * (r_next / r)
        for v, v_next, r, r_next in zip(values, values[1:], radii, radii[1:])
    ]
    worst = max(abs(ratio - 1.0) for ratio in ratios)
    passed = worst <= 0.25
    return VerificationReport(
        name="levi_radius_scaling",
        passed=passed,
        samples=len(radii),
        worst_margin=0.25 - worst,
        witness=None if passed else {"radii": list(radii), "normalized_eigenvalues": values},
        seed=seed,
        heuristic=True,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={"radii": list(radii), "normalized_eigenvalues": values, "scaled_ratios": ratios},
        series=values,
    )


def levi_oracles_report(step: Optional[float] = None) -> VerificationReport:
    """Unit ball (Levi eigenvalues 1) and the flat tube (Im z1)^2 (complex Hessian 1/2)."""
    step = step or get_verify_config().tube.fd_step
    started = time.perf_counter()
    ball = levi_form(
        lambda q: float(np.vdot(q, q).real) - 1.0, np.array([1.0, 0.0, 0.0], dtype=complex), step
    )
    flat = complex_hessian(
        lambda q: q[0].imag ** 2 - 0.05**2, np.array([0.05j, 1j, 2j], dtype=complex), step
    )
    ball_error = float(np.max(np.abs(ball.eigenvalues - 1.0)))
    flat_error = abs(flat[0, 0] - 0.5) / 0.5
    passed = ball_error <= 0.01 and flat_error <= 0.01
    return VerificationReport(
        name="levi_oracles",
        passed=passed,
        samples=2,
        worst_margin=0.01 - max(ball_error, flat_error),
        witness=None
        if passed
        else {
            "ball_eigenvalues": ball.eigenvalues.tolist(),
            "flat_entry": [flat[0, 0].real, flat[0, 0].imag],
        },
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={
            "ball_eigenvalues": ball.eigenvalues.tolist(),
            "flat_hessian_00": float(flat[0, 0].real),
        },
    )


__all__ = [
    "ConvergenceFailure",
    "LeviForm",
    "TubeDistance",
    "TubeSpec",
    "boundary_point",
    "complex_hessian",
    "levi_form",
    "levi_form_check",
    "levi_oracles_report",
    "levi_radius_probe",
    "orbit_jacobian",
    "orbit_point",
    "tube_defining_function",
    "tube_distance",
]
