import numpy as np
import pytest

from lie_domains.logic_modules.mat_groups import (
    E,
    F,
    H,
    DegenerateTriple,
    Sl2Element,
    Triple,
    exp_sl2,
    mobius_apply,
)
from lie_domains.logic_modules.orbit_geometry import (
    RayResult,
    check_freeness,
    check_totally_real,
    classify,
    complexify,
    escape_ray,
    escape_score,
    freeness_certificate,
    orbit_frame,
    orbit_normals,
    properness_probe,
    realify,
    totally_real_rank,
    vector_field,
)


def test_vector_field_matches_flow_derivative() -> None:
    w = np.array([0.3 + 1.2j, -1.0 + 0.5j])
    for X in (E, F, H, Sl2Element(0.4, -1.1, 0.7)):
        h = 1e-6
        flow = np.array(
            [
                (mobius_apply(exp_sl2(X, h), z) - mobius_apply(exp_sl2(X, -h), z)) / (2 * h)
                for z in w
            ]
        )
        assert np.allclose(vector_field(X.as_array(), w), flow, atol=1e-7)


def test_realify_roundtrip() -> None:
    v = np.array([1 + 2j, -3j, 0.5])
    assert np.array_equal(complexify(realify(v)), v)


# 测试：三个分量互异时轨道全实（6 个向量满秩），有重复分量时秩亏。
def test_totally_real_rank(base_triple: Triple) -> None:
    sigma_min, full = totally_real_rank(orbit_frame(base_triple))
    assert full
    assert sigma_min > 1e-3

    sigma_min, full = totally_real_rank(orbit_frame(Triple(1j, 1j, 2j)))
    assert not full
    assert sigma_min < 1e-10


def test_orbit_normals_are_orthogonal_to_the_orbit(base_triple: Triple) -> None:
    frame = orbit_frame(base_triple)
    normals = orbit_normals(frame)
    assert normals.shape == (6, 3)
    assert np.allclose(frame.real_tangent().T @ normals, 0.0, atol=1e-12)
    assert np.allclose(normals.T @ normals, np.eye(3), atol=1e-12)


def test_check_totally_real_report(base_triple: Triple) -> None:
    report = check_totally_real(200, seed=4, base=base_triple)
    assert report.passed, report.witness
    assert report.samples == 201
    assert report.details["repeated_component_max_sigma"] < 1e-10


# 测试：只有 ±I 固定互异三元组，群作用自由。
def test_freeness_certificate() -> None:
    assert freeness_certificate(Triple(1j, 1 + 1j, 2j))
    with pytest.raises(DegenerateTriple):
        freeness_certificate(Triple(1j, 1j, 2j))
    report = check_freeness(20, seed=1, displacement_trials=500, T=2.0, N=2.0)
    assert report.passed, report.witness
    assert report.details["min_displacement"] > 1e-9


def test_classify_directions() -> None:
    assert classify(H) == "hyperbolic"
    assert classify(E) == "parabolic"
    assert classify(F - E) == "elliptic"


def test_escape_rays(base_triple: Triple) -> None:
    hyperbolic = escape_ray(base_triple, H, s_max=10.0)
    assert hyperbolic.escaped
    assert hyperbolic.scores[-1] < hyperbolic.scores[0]

    parabolic = escape_ray(base_triple, E, s_max=50.0)
    assert parabolic.escaped
    assert parabolic.monotone

    elliptic = escape_ray(base_triple, F - E, s_max=10.0)
    assert elliptic.kind == "elliptic"
    assert min(elliptic.scores) > 1e-3
    assert elliptic.scores[0] == pytest.approx(escape_score(base_triple))


def test_properness_probe_is_heuristic(base_triple: Triple) -> None:
    report = properness_probe(base_triple, 6, seed=2)
    assert report.heuristic
    assert report.passed, report.witness
    assert sum(report.details["kinds"].values()) == 6

    fixed = properness_probe(base_triple, rays=[H, E, F - E], s_max=40.0)
    assert fixed.passed
    assert fixed.details["kinds"] == {"hyperbolic": 1, "parabolic": 1, "elliptic": 1}
    assert fixed.details["strict_escapes"] + fixed.details["relative_only_escapes"] == 2
    assert "0.001" in fixed.details["escape_rule"]
    assert "0.05" in fixed.details["escape_rule"]


# 测试：逃逸判据：绝对阈值 1e-3，或相对初值下降到 5% 以下（后者单独计数）。
def test_ray_escape_criteria() -> None:
    relative = RayResult(X=H, kind="hyperbolic", scores=[1.0, 0.01], norms=[1.0, 1.0])
    assert relative.escaped
    assert not relative.strictly_escaped

    strict = RayResult(X=H, kind="hyperbolic", scores=[1.0, 1e-4], norms=[1.0, 1.0])
    assert strict.escaped and strict.strictly_escaped

    stuck = RayResult(X=H, kind="hyperbolic", scores=[1.0, 0.5], norms=[1.0, 1.0])
    assert not stuck.escaped
