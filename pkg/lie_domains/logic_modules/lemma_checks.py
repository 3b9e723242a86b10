"""Monte-Carlo certification of the |φ(gh)| lower bound and its supporting claim.

- :func:`check_lemma`: g in PSL(2, R), |h - I| < delta  =>  |ψ(gh)| > eps,
  hence |φ(gh)| > eps^2 / 4;
- :func:`check_lemma_claim`: |ψ(g)| <= eps  =>  |Re g|^2 <= 4|Im g|^2 + 5(43/6 eps^2 - 1)
  and |Re g| <= 2|Im g|;
- :func:`winding_number` and :func:`check_windings`: the induced map on π₁;
- :func:`find_phi_square_zero`: the rejected character (a + ic)^2 vanishes in
  every neighbourhood of the orbit.
"""

from __future__ import annotations

import cmath
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..data_access.models import VerificationReport, complexes_to_reals
from ..utils.partition import ChunkOutcome, run_partitioned
from ..utils.settings import get_verify_config
from .covering_lift import log_continue
from .mat_groups import (
    DEFAULT_ZETA,
    Matrix,
    UniMat2,
    act_triple,
    big_phi_inverse,
    phi_main,
    phi_main_batch,
    phi_prelim,
    phi_square,
    psi,
    psi_batch,
    rotation,
)
from .samplers import (
    level_set_residuals,
    sample_group_batch,
    sample_near_identity,
    sample_psi_level_set,
)

logger = logging.getLogger(__name__)

CLAIM_EPS_MAX = 0.373
LEMMA_DELTA_MAX = 1.0 / 3.0
WINDING_RESIDUAL = 1e-6


class NotClosed(ValueError):
    def __init__(self, first: complex, last: complex) -> None:
        super().__init__(f"loop does not close: first = {first!r}, last = {last!r}")
        self.first = first
        self.last = last


class SearchFailed(RuntimeError):
    """The analytic zero construction did not verify numerically."""

    def __init__(self, delta: float, residual: float, distance: float) -> None:
        super().__init__(
            f"no verified zero for delta={delta:g}: |a+ic| = {residual:g}, |h - I| = {distance:g}"
        )
        self.delta = delta
        self.residual = residual
        self.distance = distance


def _matrix_witness(m: np.ndarray) -> list:
    return complexes_to_reals(np.asarray(m, dtype=complex).reshape(4))


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def claim_bound_constant(eps: float) -> float:
    """5(43/6 eps^2 - 1); negative for eps < sqrt(6/43) ≈ 0.3735."""
    return 5.0 * (43.0 / 6.0 * eps * eps - 1.0)


def check_lemma_claim(
    eps: float = 1.0 / 3.0,
    trials: int = 100_000,
    seed: int = 0,
    *,
    workers: int = 1,
    chunk_size: Optional[int] = None,
    series_cap: Optional[int] = None,
) -> VerificationReport:
    """Sample the level set |ψ(g)| <= eps in SL(2, C) and check both inequalities."""
    if not 0.0 < eps <= CLAIM_EPS_MAX:
        raise ValueError(f"eps must lie in (0, {CLAIM_EPS_MAX}], got {eps!r}")
    chunk_size = chunk_size or get_verify_config().sampling.chunk_size
    constant = claim_bound_constant(eps)
    started = time.perf_counter()
    logger.info("claim check start | eps=%.6g | trials=%s | seed=%s", eps, trials, seed)

    def kernel(rng: np.random.Generator, count: int) -> ChunkOutcome:
        g = sample_psi_level_set(rng, count, eps)
        norm_sq = np.sum(np.abs(g) ** 2, axis=(1, 2))
        # rounding in the quadratic solve; such draws are not on the level set
        valid = level_set_residuals(g) <= 1e-9 * (1.0 + norm_sq)
        g, norm_sq = g[valid], norm_sq[valid]
        re_sq = np.sum(g.real**2, axis=(1, 2))
        im_sq = np.sum(g.imag**2, axis=(1, 2))
        slack = 1e-9 * (1.0 + norm_sq)
        bound_margin = 4.0 * im_sq + constant - re_sq
        claim_margin = 2.0 * np.sqrt(im_sq) - np.sqrt(re_sq)
        bad = (bound_margin < -slack) | (claim_margin < -slack)

        outcome = ChunkOutcome(samples=int(valid.sum()), violations=int(bad.sum()))
        outcome.note_max("screened", count - outcome.samples)
        if outcome.samples:
            outcome.worst_margin = float(min(bound_margin.min(), claim_margin.min()))
            outcome.note_min("bound_margin", bound_margin.min())
            outcome.note_min("claim_margin", claim_margin.min())
            outcome.note_max("max_re_minus_4im", (re_sq - 4.0 * im_sq).max())
            outcome.series = claim_margin[: series_cap or 0].tolist()
        if outcome.violations:
            first = int(np.flatnonzero(bad)[0])
            outcome.witness = {
                "g": _matrix_witness(g[first]),
                "bound_margin": float(bound_margin[first]),
                "claim_margin": float(claim_margin[first]),
            }
        return outcome

    merged = run_partitioned(
        kernel,
        seed=seed,
        trials=trials,
        chunk_size=chunk_size,
        workers=workers,
        series_cap=series_cap,
    )
    passed = merged.violations == 0
    if not passed:
        logger.warning(
            "claim violated | violations=%s | witness=%s", merged.violations, merged.witness
        )
    return VerificationReport(
        name="lemma_claim",
        passed=passed,
        samples=merged.samples,
        worst_margin=merged.worst_margin,
        witness=merged.witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "eps": eps,
            "bound_constant": constant,
            "violations": merged.violations,
            "min_bound_margin": merged.minima.get("bound_margin"),
            "min_claim_margin": merged.minima.get("claim_margin"),
            "max_re_sq_minus_4_im_sq": merged.maxima.get("max_re_minus_4im"),
        },
        series=merged.series,
    )


def check_lemma(
    eps: float = 1.0 / 3.0,
    delta: float = 0.3,
    trials: int = 1_000_000,
    T: float = 5.0,
    N: float = 5.0,
    seed: int = 0,
    *,
    workers: int = 1,
    chunk_size: Optional[int] = None,
    series_cap: Optional[int] = None,
    name: str = "lemma",
) -> VerificationReport:
    """|ψ(gh)| > eps for g Iwasawa-sampled in G and |h - I| < delta.

    The induced projective bound |φ(gh)| > eps^2/4 is reported in ``details``.
    """
    if not 0.0 < delta < LEMMA_DELTA_MAX:
        raise ValueError(f"delta must lie in (0, 1/3), got {delta!r}")
    chunk_size = chunk_size or get_verify_config().sampling.chunk_size
    phi_bound = eps * eps / 4.0
    started = time.perf_counter()
    logger.info(
        "lemma check start | eps=%.6g | delta=%.6g | trials=%s | T=%s | N=%s | seed=%s",
        eps,
        delta,
        trials,
        T,
        N,
        seed,
    )

    def kernel(rng: np.random.Generator, count: int) -> ChunkOutcome:
        g = sample_group_batch(rng, count, T, N)
        h = sample_near_identity(rng, count, delta)
        gh = np.matmul(g, h)
        abs_psi = np.abs(psi_batch(gh))
        abs_phi = np.abs(phi_main_batch(gh))
        bad = abs_psi <= eps

        outcome = ChunkOutcome(samples=count, violations=int(bad.sum()))
        outcome.worst_margin = float(abs_psi.min() - eps)
        outcome.note_min("abs_psi", abs_psi.min())
        outcome.note_min("abs_phi", abs_phi.min())
        outcome.series = abs_psi[: series_cap or 0].tolist()
        if outcome.violations:
            first = int(np.flatnonzero(bad)[0])
            outcome.witness = {
                "g": _matrix_witness(g[first]),
                "h": _matrix_witness(h[first]),
                "abs_psi": float(abs_psi[first]),
            }
        return outcome

    merged = run_partitioned(
        kernel,
        seed=seed,
        trials=trials,
        chunk_size=chunk_size,
        workers=workers,
        series_cap=series_cap,
    )
    passed = merged.violations == 0
    min_phi = merged.minima.get("abs_phi")
    if not passed:
        logger.warning(
            "lemma violated | violations=%s | witness=%s", merged.violations, merged.witness
        )
    logger.info(
        "lemma check done | min_abs_psi=%s | min_abs_phi=%s",
        merged.minima.get("abs_psi"),
        min_phi,
    )
    return VerificationReport(
        name=name,
        passed=passed,
        samples=merged.samples,
        worst_margin=merged.worst_margin,
        witness=merged.witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "eps": eps,
            "delta": delta,
            "iwasawa_T": T,
            "iwasawa_N": N,
            "violations": merged.violations,
            "min_abs_psi": merged.minima.get("abs_psi"),
            "min_abs_phi": min_phi,
            "phi_bound": phi_bound,
            "phi_bound_holds": min_phi is not None and min_phi > phi_bound,
        },
        series=merged.series,
    )


def _winding_with_residual(
    loop: Sequence[complex],
    *,
    params: Optional[Sequence[float]] = None,
    evaluate: Optional[Callable[[float], complex]] = None,
) -> Tuple[int, float]:
    if len(loop) < 2:
        raise ValueError("a loop needs at least two values")
    first, last = complex(loop[0]), complex(loop[-1])
    if abs(first - last) >= 1e-9 * max(1.0, abs(first)):
        raise NotClosed(first, last)
    start = cmath.log(first)
    total = log_continue(loop, start, params=params, evaluate=evaluate) - start
    turns = total / (2j * math.pi)
    rounded = round(turns.real)
    return int(rounded), abs(turns - rounded)


def winding_number(
    loop: Sequence[complex],
    *,
    params: Optional[Sequence[float]] = None,
    evaluate: Optional[Callable[[float], complex]] = None,
) -> int:
    """Net change of a continuous log along a closed loop, over 2πi."""
    turns, residual = _winding_with_residual(loop, params=params, evaluate=evaluate)
    if residual >= WINDING_RESIDUAL:
        raise ValueError(f"winding rounding residual {residual:g} is too large")
    return turns


def character_loop(
    character: Callable[[Matrix], complex],
    theta_max: float,
    samples: int = 64,
    *,
    on_orbit: bool = False,
) -> Tuple[np.ndarray, list, Callable[[float], complex]]:
    """Values of ``character`` along the rotation loop θ: 0 -> theta_max.

    With ``on_orbit`` the character is read through the orbit chart instead,
    χ(Φ⁻¹(k(θ) ζ)), which is how φ on the domain is evaluated.
    """

    def evaluate(t: float) -> complex:
        k = rotation(theta_max * float(t))
        if on_orbit:
            return character(big_phi_inverse(act_triple(k, DEFAULT_ZETA)))
        return character(k)

    params = np.linspace(0.0, 1.0, samples + 1)
    return params, [evaluate(t) for t in params], evaluate


# (label, character, loop length, expected winding, through the orbit chart)
WINDING_CASES = (
    ("psi_so2", psi, 2.0 * math.pi, 1, False),
    ("phi_main_psl", phi_main, math.pi, 1, False),
    ("phi_prelim_sl", phi_prelim, 2.0 * math.pi, 1, False),
    ("phi_square_sl", phi_square, 2.0 * math.pi, 2, False),
    ("phi_main_psl_twice", phi_main, 2.0 * math.pi, 2, False),
    ("phi_hat_orbit", phi_main, math.pi, 1, True),
)


def check_windings(samples: Optional[int] = None, seed: Optional[int] = None) -> VerificationReport:
    samples = samples or get_verify_config().continuation.path_samples
    started = time.perf_counter()
    windings: Dict[str, int] = {}
    residuals: Dict[str, float] = {}
    witness = None
    for label, character, theta_max, expected, on_orbit in WINDING_CASES:
        params, values, evaluate = character_loop(character, theta_max, samples, on_orbit=on_orbit)
        turns, residual = _winding_with_residual(values, params=params, evaluate=evaluate)
        windings[label] = turns
        residuals[label] = residual
        if witness is None and (turns != expected or residual >= WINDING_RESIDUAL):
            witness = {"loop": label, "expected": expected, "winding": turns, "residual": residual}
    worst = max(residuals.values())
    return VerificationReport(
        name="windings",
        passed=witness is None,
        samples=len(WINDING_CASES),
        worst_margin=WINDING_RESIDUAL - worst,
        witness=witness,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details={
            "windings": windings,
            "expected": {label: expected for label, _, _, expected, _ in WINDING_CASES},
            "residuals": residuals,
            "samples_per_loop": samples,
        },
    )


@dataclass(frozen=True)
class PhiSquareZero:
    """g real, h near I, and (a + ic)(gh) = 0 up to rounding."""

    g: UniMat2
    h: UniMat2
    delta: float
    residual: float
    distance: float

    def to_witness(self) -> Dict[str, object]:
        return {
            "g": complexes_to_reals(self.g.entries()),
            "h": complexes_to_reals(self.h.entries()),
            "abs_a_plus_ic": self.residual,
            "h_distance": self.distance,
            "delta": self.delta,
        }


def find_phi_square_zero(delta: float, seed: int = 0) -> PhiSquareZero:
    """Closed-form zero of a + ic near the orbit.

    g = n(u)·diag(η, 1/η) with η = sqrt(delta/2) has a + ic = η and
    b + id = (u + i)/η, so h = [[1, 0], [h21, 1]] with h21 = -(a+ic)/(b+id)
    satisfies |h - I| = |h21| <= η^2 < delta.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    rng = np.random.default_rng(seed)
    u = float(rng.uniform(-1.0, 1.0))
    eta = math.sqrt(delta / 2.0)
    g = UniMat2.from_entries(eta, u / eta, 0.0, 1.0 / eta)
    h21 = -(g.a + 1j * g.c) / (g.b + 1j * g.d)
    h = UniMat2(1.0, 0.0, h21, 1.0)
    gh = g @ h
    residual = abs(phi_prelim(gh))
    distance = float(np.linalg.norm(h.as_array() - np.eye(2)))
    if residual >= 1e-6 or distance >= delta:
        raise SearchFailed(delta, residual, distance)
    logger.info(
        "phi_square zero found | delta=%.6g | residual=%.3g | |h-I|=%.6g",
        delta,
        residual,
        distance,
    )
    return PhiSquareZero(g=g, h=h, delta=delta, residual=residual, distance=distance)


def phi_square_zero_report(delta: float, seed: int = 0) -> VerificationReport:
    started = time.perf_counter()
    try:
        found = find_phi_square_zero(delta, seed)
    except SearchFailed as exc:
        logger.warning("phi_square zero search failed | %s", exc)
        return VerificationReport(
            name="phi_square_zero",
            passed=False,
            samples=1,
            witness={"delta": exc.delta, "abs_a_plus_ic": exc.residual, "h_distance": exc.distance},
            seed=seed,
            wall_time_ms=_elapsed_ms(started),
        )
    return VerificationReport(
        name="phi_square_zero",
        passed=True,
        samples=1,
        worst_margin=1e-6 - found.residual,
        seed=seed,
        wall_time_ms=_elapsed_ms(started),
        details=found.to_witness(),
    )


__all__ = [
    "NotClosed",
    "PhiSquareZero",
    "SearchFailed",
    "character_loop",
    "check_lemma",
    "check_lemma_claim",
    "check_windings",
    "claim_bound_constant",
    "find_phi_square_zero",
    "phi_square_zero_report",
    "winding_number",
]
