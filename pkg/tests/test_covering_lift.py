import cmath
import math

import numpy as np
import pytest

from lie_domains.logic_modules.covering_lift import (
    TWO_PI_I,
    BranchFloorError,
    BranchMismatchError,
    CoverElement,
    GroupPath,
    LiftedPoint,
    NotInDomain,
    RefinementExhausted,
    cover_algebra_report,
    cover_inv,
    cover_mul,
    identity_cover,
    lift_action,
    lift_action_k,
    log_continue,
    loop_generator,
    omega_tilde_membership,
    principal_log_phi,
    random_cover_element,
    re_log_phi_lower_bound,
    root_continue_k,
    sample_lifted_points,
    sample_sheet_points,
    sheet_disc_radius,
    sheet_from_cover,
    sheet_membership,
    sheet_mul,
    sheet_period,
    sheet_report,
    short_branch,
)
from lie_domains.logic_modules.mat_groups import (
    ProjMat2,
    UniMat2,
    big_phi,
    iwasawa,
    phi_main,
    projective_distance,
    rotation,
)


def _circle(turns: float, samples: int = 65):
    params = np.linspace(0.0, 1.0, samples)
    return params, [cmath.exp(2j * math.pi * turns * t) for t in params]


# 测试：沿单位圆的连续对数在绕一圈后增加 2πi，k 次根相应地乘上单位根。
def test_log_and_root_continuation_on_circle() -> None:
    params, values = _circle(1.0)
    assert log_continue(values, params=params) == pytest.approx(TWO_PI_I, abs=1e-12)
    assert log_continue(values, TWO_PI_I) == pytest.approx(2 * TWO_PI_I, abs=1e-12)
    assert root_continue_k(values, 1.0, 2) == pytest.approx(-1.0, abs=1e-12)
    assert root_continue_k(values, 1.0, 3) == pytest.approx(cmath.exp(TWO_PI_I / 3), abs=1e-12)


def test_coarse_steps_are_bisected() -> None:
    def evaluate(t: float) -> complex:
        return cmath.exp(3j * t)

    # one step of angle 3 rad is inadmissible and must be refined
    assert log_continue([1.0, evaluate(1.0)], params=[0.0, 1.0], evaluate=evaluate) == (
        pytest.approx(3j, abs=1e-12)
    )
    with pytest.raises(RefinementExhausted) as info:
        log_continue([1.0, evaluate(1.0)])
    assert info.value.index == 0
    with pytest.raises(RefinementExhausted):
        log_continue(
            [1.0, evaluate(1.0)], params=[0.0, 1.0], evaluate=evaluate, refinement_budget=0
        )


def test_continuation_errors() -> None:
    with pytest.raises(BranchFloorError) as info:
        log_continue([1.0, 1e-12, 1.0])
    assert info.value.index == 1
    with pytest.raises(BranchMismatchError):
        log_continue([1.0, 1.0], initial_log=1.0)
    with pytest.raises(BranchMismatchError):
        root_continue_k([1.0, 1.0], initial_root=2.0, k=2)
    with pytest.raises(ValueError):
        root_continue_k([1.0, 1.0], 1.0, k=1)
    with pytest.raises(ValueError):
        log_continue([])


def test_group_path_must_start_at_identity() -> None:
    with pytest.raises(ValueError):
        GroupPath(lambda t: rotation(1.0 + t))
    path = GroupPath(lambda t: rotation(math.pi * t))
    assert projective_distance(path.endpoint(), UniMat2.identity()) < 1e-12
    assert path.continue_log(0.0) == pytest.approx(TWO_PI_I, abs=1e-9)


# 测试：同伦的两条路径给出相同分支；多绕一圈旋转环路恰好增加 2πi。
def test_continuation_depends_only_on_homotopy_class() -> None:
    theta, s, u = 2.5, 1.3, -2.0
    target = iwasawa(theta, s, u)

    straight = GroupPath.concatenate(
        [lambda t: iwasawa(t * theta, t * s, t * u)], samples_per_piece=64
    )
    staircase = GroupPath.concatenate(
        [
            lambda t: iwasawa(t * theta, 0.0, 0.0),
            lambda t: iwasawa(theta, t * s, 0.0),
            lambda t: iwasawa(theta, s, t * u),
        ],
        samples_per_piece=64,
    )
    looped = GroupPath.concatenate(
        [
            lambda t: rotation(math.pi * t),
            lambda t: iwasawa(t * theta, t * s, t * u),
        ],
        samples_per_piece=64,
    )
    for path in (straight, staircase, looped):
        assert projective_distance(path.endpoint(), target) < 1e-12

    a = straight.continue_log(0.0)
    b = staircase.continue_log(0.0)
    assert abs(a - b) < 1e-8
    assert abs(looped.continue_log(0.0) - a - TWO_PI_I) < 1e-8


# 测试：环路生成元是非平凡的甲板变换，覆盖群元素按分支区分。
def test_loop_generator_is_a_deck_transformation() -> None:
    loop = loop_generator()
    assert projective_distance(loop.endpoint, ProjMat2.identity()) < 1e-12
    assert loop.branch == pytest.approx(TWO_PI_I, abs=1e-9)
    assert loop.winding == 1
    assert identity_cover().winding == 0
    assert loop_generator(-2).winding == -2
    assert not loop.same_as(identity_cover())


def test_cover_element_validation() -> None:
    with pytest.raises(ValueError):
        CoverElement(ProjMat2(UniMat2.from_entries(1j, 0.0, 0.0, -1j)), 0.0)
    with pytest.raises(BranchMismatchError):
        CoverElement(ProjMat2.identity(), 1.0)


def test_cover_group_law(rng: np.random.Generator) -> None:
    loop = loop_generator()
    assert cover_mul(loop, loop).branch == pytest.approx(2 * TWO_PI_I, abs=1e-9)
    assert cover_mul(loop, cover_inv(loop)).same_as(identity_cover())

    x, y, w = (random_cover_element(rng) for _ in range(3))
    assert cover_mul(x, cover_inv(x)).same_as(identity_cover())
    assert cover_mul(identity_cover(), x).same_as(x)
    assert cover_mul(cover_mul(x, y), w).same_as(cover_mul(x, cover_mul(y, w)))
    # loops are central
    assert cover_mul(loop, x).same_as(cover_mul(x, loop))
    assert cover_mul(loop, x).winding == x.winding + 1


def test_short_branch_matches_principal_log_near_identity() -> None:
    g = iwasawa(0.1, 0.05, -0.1)
    assert cmath.exp(short_branch(g)) == pytest.approx(phi_main(g))
    assert short_branch(g) == pytest.approx(cmath.log(phi_main(g)), abs=1e-9)


# 测试：提升区域的成员判定与 G̃ 作用（甲板变换平移 w 2πi）。
def test_lifted_membership_and_action(rng: np.random.Generator) -> None:
    z = big_phi(iwasawa(0.7, 0.3, -0.4))
    principal, _ = principal_log_phi(z)
    inside = LiftedPoint(z, principal + 3 * TWO_PI_I + 0.5)
    outside = LiftedPoint(z, principal + 1.5)
    membership = omega_tilde_membership(inside)
    assert membership.inside
    assert membership.branch == pytest.approx(principal + 3 * TWO_PI_I)
    assert not omega_tilde_membership(outside).inside
    with pytest.raises(NotInDomain):
        lift_action(identity_cover(), outside)

    moved = lift_action(loop_generator(), inside)
    expected = inside.deck_shifted(1)
    assert np.allclose(moved.z.as_array(), expected.z.as_array(), atol=1e-12)
    assert moved.w == pytest.approx(expected.w, abs=1e-9)

    assert lift_action(identity_cover(), inside).w == pytest.approx(inside.w, abs=1e-9)


def test_lifted_action_is_compatible_with_products(rng: np.random.Generator) -> None:
    x, y = random_cover_element(rng), random_cover_element(rng)
    p = sample_lifted_points(rng, 1)[0]
    one_step = lift_action(cover_mul(x, y), p)
    two_step = lift_action(x, lift_action(y, p))
    assert np.allclose(one_step.z.as_array(), two_step.z.as_array(), atol=1e-8)
    assert one_step.w == pytest.approx(two_step.w, abs=1e-8)
    assert omega_tilde_membership(one_step).inside


def test_re_log_phi_lower_bound(rng: np.random.Generator) -> None:
    empty = re_log_phi_lower_bound([])
    assert empty.passed and empty.details["vacuous"]

    report = re_log_phi_lower_bound(sample_lifted_points(rng, 50), seed=3)
    assert report.passed
    assert report.samples == 50
    assert report.worst_margin > 0
    assert len(report.series) == 50

    low = LiftedPoint(big_phi(UniMat2.identity()), -10.0)
    failing = re_log_phi_lower_bound([low])
    assert not failing.passed
    assert failing.witness["index"] == 0


# 测试：k 叶覆盖的周期恰为 k，圆盘半径与成员判定。
def test_sheet_covers() -> None:
    assert sheet_period(2) == 2
    assert sheet_period(3) == 3
    assert sheet_disc_radius(2) == pytest.approx(1.0 / 6.0)

    half = sheet_from_cover(loop_generator(), 2)
    assert half.root == pytest.approx(-1.0, abs=1e-9)
    assert half.sheet == 1
    full = sheet_from_cover(loop_generator(2), 2)
    assert full.same_as(sheet_from_cover(identity_cover(), 2))
    assert sheet_mul(half, half).same_as(full)
    with pytest.raises(ValueError):
        sheet_mul(half, sheet_from_cover(identity_cover(), 3))


def test_sheet_action(rng: np.random.Generator) -> None:
    p = sample_sheet_points(rng, 1, 3)[0]
    assert sheet_membership(p, 3).inside
    x = sheet_from_cover(random_cover_element(rng), 3)
    y = sheet_from_cover(random_cover_element(rng), 3)
    one_step = lift_action_k(sheet_mul(x, y), p)
    two_step = lift_action_k(x, lift_action_k(y, p))
    assert one_step.w == pytest.approx(two_step.w, abs=1e-8)

    z = big_phi(UniMat2.identity())
    with pytest.raises(NotInDomain):
        lift_action_k(x, LiftedPoint(z, 0.5))


def test_cover_reports_pass() -> None:
    algebra = cover_algebra_report(3, seed=11)
    assert algebra.passed, algebra.witness
    assert set(algebra.details["max_residuals"]) == {
        "deck",
        "group_law",
        "associativity",
        "inverse",
    }
    sheets = sheet_report([2, 3], 1, seed=11)
    assert sheets.passed, sheets.witness
    assert sheets.details["periods"] == {"2": 2, "3": 3}
