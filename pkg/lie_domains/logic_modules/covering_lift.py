"""覆盖群的提升：沿群路径对 log φ（以及 φ^{1/k}）做解析延拓。

Elements of the universal cover G̃ of G = PSL(2, R) are encoded as
(endpoint, branch): the endpoint g in G and the value of log φ at g continued
from log φ(e) = 0 along a representing path.  Two paths in the same homotopy
class give the same branch, and one extra loop adds exactly 2πi, so the
encoding is faithful.  Products are computed by continuing along a canonical
path: ``n`` traversals of the rotation loop θ: 0 -> ±π followed by the straight
Iwasawa path t -> k(tθ) a(ts) n(tu).

The lifted domain is Ω̃̃ = {(z, w): |w - log φ̂(z)| < 1} with φ̂ = φ ∘ Φ⁻¹,
and G̃ acts by (z, w) -> (g z, w - L + L'), L' continued from L along
t -> γ(t) h_z.  The k-sheeted covers G_k use φ^{1/k} in place of log φ.

Continuation accepts a step only when |arg(v_{i+1} / v_i)| < π/2 and bisects
the parameter interval otherwise, up to ``refinement_budget`` doublings.
"""

from __future__ import annotations

import cmath
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..data_access.models import VerificationReport, complex_to_pair, complexes_to_reals
from ..utils.settings import get_verify_config
from .mat_groups import (
    DEFAULT_ZETA,
    Matrix,
    ProjMat2,
    Triple,
    UniMat2,
    act_triple,
    as_unimat,
    big_phi,
    big_phi_inverse,
    inv,
    iwasawa,
    iwasawa_coordinates,
    phi_main,
    projective_distance,
    rotation,
)
from .samplers import sample_disc, sample_group_element, sample_near_identity

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
ADMISSIBLE_ARG = math.pi / 2
PHI_LOWER_BOUND = 1.0 / 36.0


class BranchFloorError(ArithmeticError):
    """A value along the path came closer to 0 than the branch floor."""

    def __init__(self, index: int, modulus: float, floor: float) -> None:
        super().__init__(
            f"|value| = {modulus:g} at step {index} is below the branch floor {floor:g}"
        )
        self.index = index
        self.modulus = modulus
        self.floor = floor


class RefinementExhausted(RuntimeError):
    """A step stayed inadmissible after the full bisection budget."""

    def __init__(self, index: int, budget: int) -> None:
        super().__init__(
            f"step {index} is not admissible after {budget} refinements; path under-sampled"
        )
        self.index = index
        self.budget = budget


class BranchMismatchError(ValueError):
    """The supplied branch does not match the value it claims to be a log/root of."""


class NotInDomain(ValueError):
    def __init__(self, point: "LiftedPoint", reason: str) -> None:
        super().__init__(f"point {point!r} is not in the lifted domain: {reason}")
        self.point = point
        self.reason = reason


def _continuation_defaults(
    refinement_budget: Optional[int], branch_floor: Optional[float]
) -> Tuple[int, float]:
    cfg = get_verify_config().continuation
    return (
        cfg.refinement_budget if refinement_budget is None else refinement_budget,
        cfg.branch_floor if branch_floor is None else branch_floor,
    )


def _admissible_ratios(
    values: Sequence[complex],
    params: Optional[Sequence[float]],
    evaluate: Optional[Callable[[float], complex]],
    budget: int,
    floor: float,
) -> Iterator[complex]:
    """Yield v_{i+1}/v_i for a refinement of the polyline whose steps turn by < π/2."""
    vals = [complex(v) for v in values]
    for index, value in enumerate(vals):
        if abs(value) <= floor:
            raise BranchFloorError(index, abs(value), floor)

    def refine(index: int, p0: float, v0: complex, p1: float, v1: complex, depth: int):
        ratio = v1 / v0
        if abs(cmath.phase(ratio)) < ADMISSIBLE_ARG:
            yield ratio
            return
        if evaluate is None or params is None or depth >= budget:
            raise RefinementExhausted(index, budget)
        pm = 0.5 * (p0 + p1)
        vm = complex(evaluate(pm))
        if abs(vm) <= floor:
            raise BranchFloorError(index, abs(vm), floor)
        yield from refine(index, p0, v0, pm, vm, depth + 1)
        yield from refine(index, pm, vm, p1, v1, depth + 1)

    for index in range(len(vals) - 1):
        p0 = params[index] if params is not None else float(index)
        p1 = params[index + 1] if params is not None else float(index + 1)
        yield from refine(index, p0, vals[index], p1, vals[index + 1], 0)


def log_continue(
    values: Sequence[complex],
    initial_log: complex = 0.0,
    *,
    params: Optional[Sequence[float]] = None,
    evaluate: Optional[Callable[[float], complex]] = None,
    refinement_budget: Optional[int] = None,
    branch_floor: Optional[float] = None,
) -> complex:
    """Terminal value of the continuous log along the polyline through ``values``.

    ``params``/``evaluate`` describe the underlying path and enable bisection of
    inadmissible steps; without them such a step raises RefinementExhausted.
    """
    if not values:
        raise ValueError("log_continue needs at least one value")
    budget, floor = _continuation_defaults(refinement_budget, branch_floor)
    first = complex(values[0])
    initial_log = complex(initial_log)
    if abs(cmath.exp(initial_log) - first) > 1e-9 * abs(first):
        raise BranchMismatchError(
            f"exp({initial_log!r}) does not match the first value {first!r}"
        )
    total = initial_log
    for ratio in _admissible_ratios(values, params, evaluate, budget, floor):
        total += cmath.log(ratio)
    return total


def root_continue_k(
    values: Sequence[complex],
    initial_root: complex,
    k: int,
    *,
    params: Optional[Sequence[float]] = None,
    evaluate: Optional[Callable[[float], complex]] = None,
    refinement_budget: Optional[int] = None,
    branch_floor: Optional[float] = None,
) -> complex:
    """Terminal value of the continuous k-th root along the polyline."""
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    if not values:
        raise ValueError("root_continue_k needs at least one value")
    budget, floor = _continuation_defaults(refinement_budget, branch_floor)
    first = complex(values[0])
    initial_root = complex(initial_root)
    if abs(initial_root**k - first) > 1e-9 * k * abs(first):
        raise BranchMismatchError(
            f"{initial_root!r}**{k} does not match the first value {first!r}"
        )
    change = 0j
    for ratio in _admissible_ratios(values, params, evaluate, budget, floor):
        change += cmath.log(ratio)
    return initial_root * cmath.exp(change / k)


Curve = Callable[[float], UniMat2]


@dataclass(frozen=True)
class GroupPath:
    """A path t -> curve(t), t in [0, 1], in the group starting at the identity.

    ``num_samples`` is the initial uniform sampling; continuation refines it
    where needed, up to ``refinement_budget`` doublings per step.
    """

    curve: Curve
    num_samples: int = 64
    refinement_budget: int = 20

    def __post_init__(self) -> None:
        if self.num_samples < 2:
            raise ValueError("a group path needs at least two samples")
        start = self.curve(0.0)
        if projective_distance(start, UniMat2.identity()) > 1e-12:
            raise ValueError("a group path must start at the identity")

    @classmethod
    def concatenate(
        cls, pieces: Sequence[Curve], *, samples_per_piece: Optional[int] = None
    ) -> "GroupPath":
        """Run the pieces one after another, each over an equal share of [0, 1].

        Each piece must start where the previous one ended (projectively).
        """
        if not pieces:
            return cls(lambda t: UniMat2.identity(), num_samples=2)
        per_piece = samples_per_piece or get_verify_config().continuation.path_samples
        count = len(pieces)

        def curve(t: float) -> UniMat2:
            scaled = min(max(t, 0.0), 1.0) * count
            index = min(int(scaled), count - 1)
            return pieces[index](scaled - index)

        return cls(curve, num_samples=per_piece * count + 1)

    @classmethod
    def rotation_loop(
        cls, turns: int = 1, *, samples_per_piece: Optional[int] = None
    ) -> "GroupPath":
        """θ: 0 -> π·turns along k(θ); a loop in PSL(2, R) for every integer turns."""
        piece = _loop_piece(1 if turns >= 0 else -1)
        return cls.concatenate([piece] * abs(turns), samples_per_piece=samples_per_piece)

    @property
    def params(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.num_samples)

    @property
    def samples(self) -> List[ProjMat2]:
        return [ProjMat2(self.curve(float(t))) for t in self.params]

    def endpoint(self) -> ProjMat2:
        return ProjMat2(self.curve(1.0))

    def inverted(self) -> "GroupPath":
        """t -> curve(t)^-1, the path of the inverse element."""
        curve = self.curve
        return GroupPath(
            lambda t: inv(curve(t)),
            num_samples=self.num_samples,
            refinement_budget=self.refinement_budget,
        )

    def _evaluator(
        self,
        character: Callable[[Matrix], complex],
        left: Optional[Matrix],
        right: Optional[Matrix],
    ) -> Callable[[float], complex]:
        lhs = as_unimat(left) if left is not None else None
        rhs = as_unimat(right) if right is not None else None
        curve = self.curve

        def evaluate(t: float) -> complex:
            g = curve(float(t))
            if lhs is not None:
                g = lhs @ g
            if rhs is not None:
                g = g @ rhs
            return character(g)

        return evaluate

    def character_values(
        self,
        *,
        left: Optional[Matrix] = None,
        right: Optional[Matrix] = None,
        character: Callable[[Matrix], complex] = phi_main,
    ) -> Tuple[np.ndarray, List[complex], Callable[[float], complex]]:
        """Values of character(left · γ(t) · right) on the sample grid."""
        evaluate = self._evaluator(character, left, right)
        params = self.params
        return params, [evaluate(t) for t in params], evaluate

    def continue_log(
        self,
        initial_log: complex,
        *,
        left: Optional[Matrix] = None,
        right: Optional[Matrix] = None,
        character: Callable[[Matrix], complex] = phi_main,
        branch_floor: Optional[float] = None,
    ) -> complex:
        params, values, evaluate = self.character_values(
            left=left, right=right, character=character
        )
        return log_continue(
            values,
            initial_log,
            params=params,
            evaluate=evaluate,
            refinement_budget=self.refinement_budget,
            branch_floor=branch_floor,
        )

    def continue_root(
        self,
        initial_root: complex,
        k: int,
        *,
        left: Optional[Matrix] = None,
        right: Optional[Matrix] = None,
        branch_floor: Optional[float] = None,
    ) -> complex:
        params, values, evaluate = self.character_values(left=left, right=right)
        return root_continue_k(
            values,
            initial_root,
            k,
            params=params,
            evaluate=evaluate,
            refinement_budget=self.refinement_budget,
            branch_floor=branch_floor,
        )


def _loop_piece(direction: int) -> Curve:
    return lambda t: rotation(direction * math.pi * t)


def _short_piece(endpoint: Matrix) -> Curve:
    theta, s, u = iwasawa_coordinates(endpoint)
    return lambda t: iwasawa(t * theta, t * s, t * u)


def short_path(endpoint: Matrix) -> GroupPath:
    """Straight Iwasawa path from e to the endpoint, θ in [0, π)."""
    return GroupPath.concatenate([_short_piece(endpoint)])


def short_branch(endpoint: Matrix) -> complex:
    """log φ(endpoint) continued along :func:`short_path`."""
    return short_path(endpoint).continue_log(0.0)


@dataclass(frozen=True)
class CoverElement:
    """An element of the universal cover G̃: an endpoint in G and a branch of log φ."""

    endpoint: ProjMat2
    branch: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "endpoint", ProjMat2.of(self.endpoint))
        object.__setattr__(self, "branch", complex(self.branch))
        if not self.endpoint.rep.is_real(1e-9):
            raise ValueError("cover elements live over the real group PSL(2, R)")
        value = phi_main(self.endpoint)
        if abs(cmath.exp(self.branch) - value) > 1e-9 * abs(value):
            raise BranchMismatchError(
                f"exp(branch) = {cmath.exp(self.branch)!r} differs from φ(endpoint) = {value!r}"
            )

    @property
    def winding(self) -> int:
        """Number of extra rotation loops relative to the short Iwasawa path."""
        turns = (self.branch - short_branch(self.endpoint)) / TWO_PI_I
        rounded = round(turns.real)
        if abs(turns - rounded) > 1e-6:
            raise BranchMismatchError(
                f"branch is not a short-path branch plus whole loops (turns = {turns!r})"
            )
        return int(rounded)

    def same_as(self, other: "CoverElement", tol: float = 1e-8) -> bool:
        scale = 1.0 + self.endpoint.rep.norm
        return (
            projective_distance(self.endpoint, other.endpoint) <= tol * scale
            and abs(self.branch - other.branch) < math.pi
        )


def identity_cover() -> CoverElement:
    return CoverElement(ProjMat2.identity(), 0.0)


def cover_from_path(path: GroupPath) -> CoverElement:
    return CoverElement(path.endpoint(), path.continue_log(0.0))


def loop_generator(turns: int = 1) -> CoverElement:
    """The deck generator: the rotation loop θ: 0 -> π, branch 2πi."""
    return cover_from_path(GroupPath.rotation_loop(turns))


def canonical_path(x: CoverElement) -> GroupPath:
    """``winding`` rotation loops followed by the short Iwasawa path."""
    n = x.winding
    pieces: List[Curve] = [_loop_piece(1 if n >= 0 else -1)] * abs(n)
    pieces.append(_short_piece(x.endpoint))
    return GroupPath.concatenate(pieces)


def cover_mul(x: CoverElement, y: CoverElement) -> CoverElement:
    """x·y: continue log φ from x.branch along t -> x.endpoint · γ_y(t)."""
    branch = canonical_path(y).continue_log(x.branch, left=x.endpoint)
    return CoverElement(x.endpoint @ y.endpoint, branch)


def cover_inv(x: CoverElement) -> CoverElement:
    path = canonical_path(x).inverted()
    return CoverElement(path.endpoint(), path.continue_log(0.0))


def random_cover_element(
    rng: np.random.Generator, *, T: float = 1.5, N: float = 1.5, max_turns: int = 2
) -> CoverElement:
    g = ProjMat2(sample_group_element(rng, T, N))
    turns = int(rng.integers(-max_turns, max_turns + 1))
    return CoverElement(g, short_branch(g) + TWO_PI_I * turns)


@dataclass(frozen=True)
class LiftedPoint:
    """A point (z, w) of C^3 x C; z in the base domain, w near a branch of log φ̂(z)."""

    z: Triple
    w: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", complex(self.w))

    def deck_shifted(self, turns: int = 1) -> "LiftedPoint":
        return LiftedPoint(self.z, self.w + TWO_PI_I * turns)


class Membership(NamedTuple):
    inside: bool
    branch: Optional[complex]


def principal_log_phi(z: Triple, zeta: Triple = DEFAULT_ZETA) -> Tuple[complex, UniMat2]:
    """Principal Log φ(Φ⁻¹(z)) together with the group coordinate h_z."""
    h = big_phi_inverse(z, zeta).rep
    value = phi_main(h)
    _, floor = _continuation_defaults(None, None)
    if abs(value) <= floor:
        raise BranchFloorError(0, abs(value), floor)
    return cmath.log(value), h


def omega_tilde_membership(p: LiftedPoint, zeta: Triple = DEFAULT_ZETA) -> Membership:
    """Is |w - L| < 1 for some branch L = L0 + 2πik of log φ̂(z)?"""
    if not p.z.is_distinct_halfplane():
        return Membership(False, None)
    try:
        principal, _ = principal_log_phi(p.z, zeta)
    except (BranchFloorError, ValueError):
        return Membership(False, None)
    turns = round((p.w - principal).imag / (2.0 * math.pi))
    branch = principal + TWO_PI_I * turns
    if abs(p.w - branch) < 1.0:
        return Membership(True, branch)
    return Membership(False, None)


def lift_action(gt: CoverElement, p: LiftedPoint, zeta: Triple = DEFAULT_ZETA) -> LiftedPoint:
    """(z, w) -> (g z, w - L + L') with L' continued from L along t -> γ(t) h_z."""
    inside, branch = omega_tilde_membership(p, zeta)
    if not inside or branch is None:
        raise NotInDomain(p, "no branch of log φ within distance 1")
    h_z = big_phi_inverse(p.z, zeta).rep
    moved = canonical_path(gt).continue_log(branch, right=h_z)
    return LiftedPoint(act_triple(gt.endpoint, p.z), p.w - branch + moved)


def sample_lifted_points(
    rng: np.random.Generator,
    n: int,
    *,
    delta: float = 0.05,
    T: float = 1.5,
    N: float = 1.5,
    max_turns: int = 3,
    zeta: Triple = DEFAULT_ZETA,
) -> List[LiftedPoint]:
    """Points of Ω̃̃ over z = Φ(g h) with g in G and |h - I| < delta."""
    perturbations = sample_near_identity(rng, n, delta)
    offsets = 0.999 * sample_disc(rng, n, 1.0)
    points = []
    for index in range(n):
        g = sample_group_element(rng, T, N)
        h = UniMat2.from_array(perturbations[index])
        z = big_phi(g @ h, zeta)
        principal, _ = principal_log_phi(z, zeta)
        turns = int(rng.integers(-max_turns, max_turns + 1))
        points.append(LiftedPoint(z, principal + TWO_PI_I * turns + offsets[index]))
    return points


def _lifted_witness(index: int, p: LiftedPoint) -> dict:
    return {"index": index, "z": complexes_to_reals(p.z), "w": complex_to_pair(p.w)}


def re_log_phi_lower_bound(
    samples: Sequence[LiftedPoint], eps: float = PHI_LOWER_BOUND, *, seed: Optional[int] = None
) -> VerificationReport:
    """Check Re w > log(eps) - 1 on lifted samples (disc radius 1 as slack)."""
    threshold = math.log(eps) - 1.0
    if not samples:
        return VerificationReport(
            name="re_log_phi_lower_bound",
            passed=True,
            samples=0,
            seed=seed,
            details={"vacuous": True, "threshold": threshold, "eps": eps},
        )
    margins = [p.w.real - threshold for p in samples]
    worst = int(np.argmin(margins))
    passed = margins[worst] > 0
    if not passed:
        logger.warning(
            "Re log φ bound violated | index=%s | margin=%.6g", worst, margins[worst]
        )
    return VerificationReport(
        name="re_log_phi_lower_bound",
        passed=passed,
        samples=len(samples),
        worst_margin=float(margins[worst]),
        witness=None if passed else _lifted_witness(worst, samples[worst]),
        seed=seed,
        details={
            "vacuous": False,
            "threshold": threshold,
            "eps": eps,
            "min_re_w": float(samples[worst].w.real),
        },
        series=[float(p.w.real) for p in samples],
    )


# --- k-sheeted covers G_k: φ^{1/k} in place of log φ ---------------------------


@dataclass(frozen=True)
class SheetElement:
    """An element of G_k: an endpoint in G and a k-th root of φ(endpoint)."""

    endpoint: ProjMat2
    root: complex
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "endpoint", ProjMat2.of(self.endpoint))
        object.__setattr__(self, "root", complex(self.root))
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k!r}")
        value = phi_main(self.endpoint)
        if abs(self.root**self.k - value) > 1e-9 * self.k * abs(value):
            raise BranchMismatchError(f"root**{self.k} does not match φ(endpoint) = {value!r}")

    @property
    def sheet(self) -> int:
        """Sheet index in Z/kZ relative to the short-path root."""
        base = cmath.exp(short_branch(self.endpoint) / self.k)
        return round(cmath.phase(self.root / base) * self.k / (2.0 * math.pi)) % self.k

    def same_as(self, other: "SheetElement", tol: float = 1e-8) -> bool:
        scale = 1.0 + self.endpoint.rep.norm
        return (
            self.k == other.k
            and projective_distance(self.endpoint, other.endpoint) <= tol * scale
            and abs(self.root - other.root) <= 1e-6 * (1.0 + abs(self.root))
        )


def sheet_from_cover(x: CoverElement, k: int) -> SheetElement:
    return SheetElement(x.endpoint, cmath.exp(x.branch / k), k)


def cover_from_sheet(x: SheetElement) -> CoverElement:
    """The representative in G̃ with winding in [0, k)."""
    return CoverElement(x.endpoint, short_branch(x.endpoint) + TWO_PI_I * x.sheet)


def sheet_mul(x: SheetElement, y: SheetElement) -> SheetElement:
    if x.k != y.k:
        raise ValueError("cannot multiply elements of different covers")
    return sheet_from_cover(cover_mul(cover_from_sheet(x), cover_from_sheet(y)), x.k)


def sheet_disc_radius(k: int, eps: float = PHI_LOWER_BOUND) -> float:
    """Half the minimal gap between k-th roots of a value of modulus >= eps."""
    return eps ** (1.0 / k) * math.sin(math.pi / k)


def sheet_membership(
    p: LiftedPoint, k: int, zeta: Triple = DEFAULT_ZETA, eps: float = PHI_LOWER_BOUND
) -> Membership:
    """Is w within :func:`sheet_disc_radius` of some k-th root of φ̂(z)?"""
    if not p.z.is_distinct_halfplane():
        return Membership(False, None)
    try:
        principal, _ = principal_log_phi(p.z, zeta)
    except (BranchFloorError, ValueError):
        return Membership(False, None)
    roots = [cmath.exp((principal + TWO_PI_I * j) / k) for j in range(k)]
    nearest = min(roots, key=lambda r: abs(p.w - r))
    if abs(p.w - nearest) < sheet_disc_radius(k, eps):
        return Membership(True, nearest)
    return Membership(False, None)


def lift_action_k(x: SheetElement, p: LiftedPoint, zeta: Triple = DEFAULT_ZETA) -> LiftedPoint:
    """(z, w) -> (g z, w - r + r') with r' the k-th root continued from r."""
    inside, root = sheet_membership(p, x.k, zeta)
    if not inside or root is None:
        raise NotInDomain(p, f"no {x.k}-th root of φ within the sheet disc")
    h_z = big_phi_inverse(p.z, zeta).rep
    moved = canonical_path(cover_from_sheet(x)).continue_root(root, x.k, right=h_z)
    return LiftedPoint(act_triple(x.endpoint, p.z), p.w - root + moved)


def sample_sheet_points(
    rng: np.random.Generator,
    n: int,
    k: int,
    *,
    delta: float = 0.05,
    T: float = 1.5,
    N: float = 1.5,
    zeta: Triple = DEFAULT_ZETA,
) -> List[LiftedPoint]:
    """Points (z, w) with w inside the disc around a random k-th root of φ̂(z)."""
    perturbations = sample_near_identity(rng, n, delta)
    offsets = 0.9 * sample_disc(rng, n, sheet_disc_radius(k))
    points = []
    for index in range(n):
        g = sample_group_element(rng, T, N)
        z = big_phi(g @ UniMat2.from_array(perturbations[index]), zeta)
        principal, _ = principal_log_phi(z, zeta)
        sheet = int(rng.integers(0, k))
        root = cmath.exp((principal + TWO_PI_I * sheet) / k)
        points.append(LiftedPoint(z, root + offsets[index]))
    return points


def _point_gap(p: LiftedPoint, q: LiftedPoint) -> float:
    scale = 1.0 + math.sqrt(p.z.norm_sq)
    return max(float(np.max(np.abs(p.z.as_array() - q.z.as_array()))) / scale, abs(p.w - q.w))


def cover_algebra_report(
    instances: int, seed: int = 0, *, delta: float = 0.05, tol: float = 1e-8
) -> VerificationReport:
    """Deck commutation, lifted group law, associativity and inverses on random instances."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = {"deck": 0.0, "group_law": 0.0, "associativity": 0.0, "inverse": 0.0}
    witness = None
    series: List[float] = []
    for index in range(instances):
        x, y, w = (random_cover_element(rng) for _ in range(3))
        p = sample_lifted_points(rng, 1, delta=delta)[0]

        moved = lift_action(x, p)
        deck = _point_gap(lift_action(x, p.deck_shifted(1)), moved.deck_shifted(1))
        law = _point_gap(lift_action(cover_mul(x, y), p), lift_action(x, lift_action(y, p)))
        left, right = cover_mul(cover_mul(x, y), w), cover_mul(x, cover_mul(y, w))
        assoc = abs(left.branch - right.branch) + projective_distance(left.endpoint, right.endpoint)
        unit = cover_mul(x, cover_inv(x))
        inverse = abs(unit.branch) + projective_distance(unit.endpoint, UniMat2.identity())

        residuals = {"deck": deck, "group_law": law, "associativity": assoc, "inverse": inverse}
        series.append(max(residuals.values()))
        for key, value in residuals.items():
            worst[key] = max(worst[key], value)
        if witness is None and max(residuals.values()) >= tol:
            witness = {
                "index": index,
                "x": [*complexes_to_reals(x.endpoint.rep.entries()), *complex_to_pair(x.branch)],
                "y": [*complexes_to_reals(y.endpoint.rep.entries()), *complex_to_pair(y.branch)],
                "point": _lifted_witness(index, p),
                "residuals": residuals,
            }
            logger.warning("cover algebra residual | index=%s | residuals=%s", index, residuals)

    return VerificationReport(
        name="cover_algebra",
        passed=witness is None,
        samples=instances,
        worst_margin=tol - max(worst.values()),
        witness=witness,
        seed=seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={"max_residuals": worst, "tolerance": tol},
        series=series,
    )


def sheet_period(k: int, *, max_turns: Optional[int] = None) -> int:
    """Number of loop traversals after which the continued k-th root of φ returns to 1."""
    loop = GroupPath.rotation_loop(1)
    root = 1.0 + 0j
    for turn in range(1, (max_turns or 2 * k) + 1):
        root = loop.continue_root(root, k)
        if abs(root - 1.0) < 1e-9:
            return turn
    raise ArithmeticError(f"no sheet period found for k={k} within {max_turns or 2 * k} turns")


def sheet_report(
    ks: Sequence[int], instances: int, seed: int = 0, *, delta: float = 0.05, tol: float = 1e-8
) -> VerificationReport:
    """Exact sheet periods and the lifted G_k group law for each k."""
    started = time.perf_counter()
    rng = np.random.default_rng(seed)
    periods = {}
    worst_law = 0.0
    witness = None
    for k in sorted(set(ks)):
        periods[str(k)] = sheet_period(k)
        if periods[str(k)] != k and witness is None:
            witness = {"k": k, "period": periods[str(k)]}
        for _ in range(instances):
            x = sheet_from_cover(random_cover_element(rng), k)
            y = sheet_from_cover(random_cover_element(rng), k)
            p = sample_sheet_points(rng, 1, k, delta=delta)[0]
            law = _point_gap(
                lift_action_k(sheet_mul(x, y), p), lift_action_k(x, lift_action_k(y, p))
            )
            worst_law = max(worst_law, law)
            if law >= tol and witness is None:
                witness = {"k": k, "point": _lifted_witness(0, p), "residual": law}
    return VerificationReport(
        name="sheet_covers",
        passed=witness is None,
        samples=len(periods) * (1 + instances),
        worst_margin=tol - worst_law,
        witness=witness,
        seed=seed,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
        details={"periods": periods, "max_group_law_residual": worst_law},
    )


__all__ = [
    "BranchFloorError",
    "BranchMismatchError",
    "CoverElement",
    "GroupPath",
    "LiftedPoint",
    "Membership",
    "NotInDomain",
    "RefinementExhausted",
    "SheetElement",
    "canonical_path",
    "cover_from_path",
    "cover_from_sheet",
    "cover_inv",
    "cover_mul",
    "identity_cover",
    "lift_action",
    "lift_action_k",
    "log_continue",
    "loop_generator",
    "omega_tilde_membership",
    "random_cover_element",
    "re_log_phi_lower_bound",
    "root_continue_k",
    "cover_algebra_report",
    "sample_lifted_points",
    "sample_sheet_points",
    "sheet_period",
    "sheet_report",
    "sheet_from_cover",
    "sheet_membership",
    "sheet_mul",
    "short_branch",
]
