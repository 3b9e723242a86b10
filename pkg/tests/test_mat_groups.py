import cmath
import math

import numpy as np
import pytest

from lie_domains.logic_modules.mat_groups import (
    E,
    F,
    H,
    DegenerateTriple,
    DeterminantError,
    HalfPlanePoint,
    PoleError,
    ProjMat2,
    Triple,
    UniMat2,
    act_triple,
    big_phi,
    big_phi_inverse,
    exp_sl2,
    inv,
    iwasawa,
    iwasawa_coordinates,
    mobius_apply,
    mul,
    phi_main,
    phi_prelim,
    phi_square,
    projective_distance,
    psi,
    rotation,
)


def _close(g, h, tol=1e-10):
    return projective_distance(g, h) < tol


# 测试：非单模矩阵应被拒绝；from_entries 对 det 漂移做 1/sqrt(det) 归一。
def test_unimat_rejects_non_unimodular_and_rescales() -> None:
    with pytest.raises(DeterminantError):
        UniMat2(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DeterminantError):
        UniMat2.from_entries(1.0, 2.0, 2.0, 4.0)

    rescaled = UniMat2.from_entries(2.0, 0.0, 0.0, 2.0)
    assert rescaled == UniMat2.identity()
    assert abs(rescaled.det - 1.0) < 1e-15


def test_norm_lower_bound_for_unimodular() -> None:
    g = iwasawa(0.3, 1.2, -0.7)
    assert g.norm_sq >= 2.0 * (1.0 - 1e-12)
    assert UniMat2.identity().norm_sq == pytest.approx(2.0)


def test_projective_class_ignores_sign() -> None:
    g = iwasawa(1.1, 0.4, 2.0)
    assert ProjMat2(g) == ProjMat2(-g)
    assert ProjMat2(-UniMat2.identity()) == ProjMat2.identity()
    assert projective_distance(g, -g) == pytest.approx(0.0, abs=1e-15)


def test_mul_and_inverse() -> None:
    g = iwasawa(0.2, -0.5, 1.5)
    h = iwasawa(2.9, 0.8, -0.3)
    assert _close(mul(g, inv(g)), UniMat2.identity())
    assert isinstance(mul(ProjMat2(g), h), ProjMat2)
    assert isinstance(mul(g, h), UniMat2)
    assert _close(mul(mul(g, h), inv(h)), g)


# 测试：闭式指数映射与旋转、对角子群一致。
def test_exp_sl2_closed_forms() -> None:
    theta = 0.7
    assert _close(exp_sl2(F - E, theta), rotation(theta), 1e-12)
    assert _close(exp_sl2(E - F, theta), rotation(-theta), 1e-12)

    diag = exp_sl2(H, 0.9)
    assert diag.a == pytest.approx(math.exp(0.9))
    assert diag.d == pytest.approx(math.exp(-0.9))

    unipotent = exp_sl2(E, 2.5)
    assert unipotent.as_array() == pytest.approx(np.array([[1.0, 2.5], [0.0, 1.0]]))

    # near-parabolic branch uses the series
    tiny = exp_sl2(E + F * 1e-10, 1.0)
    assert abs(tiny.det - 1.0) < 1e-12


def test_rotation_half_turn_is_minus_identity() -> None:
    assert _close(rotation(math.pi), UniMat2.identity(), 1e-12)
    assert rotation(math.pi).as_array() == pytest.approx(-np.eye(2), abs=1e-15)


def test_iwasawa_coordinates_roundtrip() -> None:
    for theta, s, u in [(0.0, 0.0, 0.0), (0.4, -1.3, 2.2), (3.0, 2.0, -4.5)]:
        g = iwasawa(theta, s, u)
        t2, s2, u2 = iwasawa_coordinates(g)
        assert (t2, s2, u2) == pytest.approx((theta, s, u), abs=1e-10)


def test_iwasawa_coordinates_projective_range() -> None:
    g = -iwasawa(0.5, 0.3, 1.0)
    theta, s, u = iwasawa_coordinates(g)
    assert 0.0 <= theta < math.pi
    assert _close(iwasawa(theta, s, u), g)
    with pytest.raises(ValueError):
        iwasawa_coordinates(UniMat2.from_entries(1j, 0.0, 0.0, -1j))


# 测试：Möbius 作用的极点检测，以及三元组作用时报告分量编号。
def test_mobius_pole_detection() -> None:
    s = UniMat2(0.0, -1.0, 1.0, 0.0)
    with pytest.raises(PoleError):
        mobius_apply(s, 0.0)
    with pytest.raises(PoleError) as info:
        act_triple(s, Triple(1j, 0.0, 2j))
    assert info.value.index == 1
    assert mobius_apply(s, 1j) == pytest.approx(1j)


def test_real_matrices_preserve_upper_half_plane() -> None:
    point = HalfPlanePoint(0.3 + 0.5j)
    moved = point.moved_by(iwasawa(1.0, 0.7, -2.0))
    assert moved.z.imag > 0
    with pytest.raises(ValueError):
        HalfPlanePoint(1.0 - 0.1j)
    with pytest.raises(ValueError):
        point.moved_by(UniMat2.from_entries(1j, 0.0, 0.0, -1j))


def test_characters_at_identity_and_rotation() -> None:
    assert psi(UniMat2.identity()) == pytest.approx(2.0)
    assert phi_main(UniMat2.identity()) == pytest.approx(1.0)
    theta = 0.8
    k = rotation(theta)
    assert psi(k) == pytest.approx(2.0 * cmath.exp(1j * theta))
    assert phi_main(k) == pytest.approx(cmath.exp(2j * theta))
    assert phi_prelim(k) == pytest.approx(cmath.exp(1j * theta))
    assert phi_square(k) == pytest.approx(cmath.exp(2j * theta))


def test_psi_is_odd_and_phi_is_projective() -> None:
    g = UniMat2.from_entries(1.0 + 0.2j, 0.5, -0.3j, 1.0)
    assert psi(-g) == pytest.approx(-psi(g))
    assert phi_main(-g) == pytest.approx(phi_main(g))
    assert phi_main(ProjMat2(-g)) == pytest.approx(phi_main(g))


def test_psi_vanishes_on_worked_example() -> None:
    g = UniMat2(1j, 1.0 + 1j, -1.0 + 1j, 1j)
    assert psi(g) == pytest.approx(0.0, abs=1e-15)
    real_part = np.real(g.as_array())
    imag_part = np.imag(g.as_array())
    assert np.sum(real_part**2) == pytest.approx(2.0)
    assert np.sum(imag_part**2) == pytest.approx(4.0)


# 测试：Φ(h) = hζ 的闭式逆映射，以及 G 等变性。
def test_big_phi_inverse_and_equivariance(base_triple: Triple) -> None:
    h = UniMat2.from_entries(1.1 + 0.2j, 0.3 - 0.1j, -0.2j, 0.95)
    z = big_phi(h, base_triple)
    assert _close(big_phi_inverse(z, base_triple), h, 1e-9)

    g = iwasawa(2.0, 0.6, -1.1)
    left = big_phi(mul(g, h), base_triple)
    right = act_triple(g, z)
    assert np.allclose(left.as_array(), right.as_array(), atol=1e-12)


def test_degenerate_triples_are_rejected() -> None:
    with pytest.raises(DegenerateTriple):
        Triple(1j, 1j, 2j).require_distinct()
    with pytest.raises(DegenerateTriple):
        big_phi_inverse(Triple(1j, 1j + 1e-12, 2j))
    assert not Triple(1j, 1 - 1j, 2j).is_distinct_halfplane()


def _random_halfplane_triple(rng: np.random.Generator) -> Triple:
    while True:
        zs = rng.uniform(-2.0, 2.0, 3) + 1j * rng.uniform(0.1, 2.0, 3)
        t = Triple(*zs)
        if t.min_pairwise_distance() > 1e-3:
            return t


def _random_complex_unimat(rng: np.random.Generator) -> UniMat2:
    while True:
        a, b, c, d = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        if abs(a * d - b * c) > 0.2:
            return UniMat2.from_entries(a, b, c, d)


# 测试：实群元素作用保持三元组两两不同且仍在上半平面（1000 组随机 (g, t)）。
def test_act_triple_preserves_distinctness(rng: np.random.Generator) -> None:
    for _ in range(1000):
        g = iwasawa(
            rng.uniform(0.0, math.pi), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)
        )
        image = act_triple(g, _random_halfplane_triple(rng))
        assert image.is_distinct_halfplane()
        assert image.min_pairwise_distance() > 0.0


# 测试：Φ 单射：投影距离 > 1e-3 的矩阵对，其像至少相差 1e-6。
def test_big_phi_separates_distinct_classes(rng: np.random.Generator) -> None:
    checked = 0
    for index in range(1000):
        h1 = _random_complex_unimat(rng)
        if index % 2:
            eps = 1e-2 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
            h2 = mul(h1, UniMat2.from_entries(1 + eps[0], eps[1], eps[2], 1 + eps[3]))
        else:
            h2 = _random_complex_unimat(rng)
        if projective_distance(h1, h2) <= 1e-3:
            continue
        gap = np.max(np.abs(big_phi(h1).as_array() - big_phi(h2).as_array()))
        assert gap > 1e-6
        checked += 1
    assert checked > 900
