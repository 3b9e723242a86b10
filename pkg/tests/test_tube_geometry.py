import math

import numpy as np
import pytest

from lie_domains.logic_modules.mat_groups import Triple, iwasawa
from lie_domains.logic_modules.orbit_geometry import realify
from lie_domains.logic_modules.tube_geometry import (
    TubeSpec,
    boundary_point,
    complex_hessian,
    levi_form,
    levi_form_check,
    levi_oracles_report,
    levi_radius_probe,
    orbit_jacobian,
    orbit_point,
    tube_distance,
)


def test_tube_radius_must_keep_components_apart(base_triple: Triple) -> None:
    assert base_triple.min_pairwise_distance() == pytest.approx(1.0)
    TubeSpec(base=base_triple, radius=0.49)
    with pytest.raises(ValueError):
        TubeSpec(base=base_triple, radius=0.5)
    with pytest.raises(ValueError):
        TubeSpec(base=base_triple, radius=0.0)


def test_orbit_jacobian_matches_finite_differences() -> None:
    params = np.array([0.6, -0.4, 1.3])
    analytic = orbit_jacobian(params)
    h = 1e-6
    numeric = np.column_stack(
        [
            (realify(orbit_point(params + h * e)) - realify(orbit_point(params - h * e))) / (2 * h)
            for e in np.eye(3)
        ]
    )
    assert np.allclose(analytic, numeric, atol=1e-6)


# 测试：轨道上的点距离为 0，并恢复 Iwasawa 坐标；边界点距离等于半径。
def test_tube_distance_on_orbit_and_boundary() -> None:
    spec = TubeSpec()
    params = (0.4, 0.2, -0.3)
    on_orbit = tube_distance(orbit_point(params), spec)
    assert on_orbit.distance < 1e-7
    assert on_orbit.params == pytest.approx(params, abs=1e-6)
    assert on_orbit.agreeing_starts >= 2

    g = iwasawa(1.2, -0.3, 0.5)
    point, located_params = boundary_point(spec, g, np.array([0.3, -1.0, 0.2]))
    located = tube_distance(point, spec)
    assert located.distance == pytest.approx(spec.radius, abs=1e-7)
    warm = tube_distance(point, spec, warm_start=located_params)
    assert warm.distance == pytest.approx(located.distance, abs=1e-9)


# 测试：复 Hessian 与 Levi 形式的解析基准（单位球与平坦管）。
def test_complex_hessian_oracles() -> None:
    p = np.array([0.3 + 0.1j, -0.2j, 1.0])
    hermitian = complex_hessian(lambda q: float(np.vdot(q, q).real), p)
    assert np.allclose(hermitian, np.eye(3), atol=1e-6)

    pluriharmonic = complex_hessian(lambda q: float((q[0] ** 2).real + q[1].imag), p)
    assert np.allclose(pluriharmonic, 0.0, atol=1e-6)

    flat = complex_hessian(lambda q: q[0].imag ** 2, p)
    assert flat[0, 0].real == pytest.approx(0.5, rel=1e-6)


def test_levi_form_of_the_ball() -> None:
    sphere = levi_form(
        lambda q: float(np.vdot(q, q).real) - 1.0, np.array([0.6, 0.8j, 0.0]), 1e-4
    )
    assert sphere.eigenvalues == pytest.approx([1.0, 1.0], rel=1e-4)
    assert sphere.gradient_norm == pytest.approx(2.0, rel=1e-6)
    assert sphere.normalized_min == pytest.approx(0.5, rel=1e-4)
    with pytest.raises(ValueError):
        levi_form(lambda q: float(np.vdot(q, q).real), np.zeros(3, dtype=complex))


def test_levi_oracles_report() -> None:
    report = levi_oracles_report(1e-4)
    assert report.passed, report.witness
    assert report.details["flat_hessian_00"] == pytest.approx(0.5, rel=0.01)


def test_orbit_tube_is_strongly_pseudoconvex() -> None:
    report = levi_form_check(TubeSpec(radius=0.05), 3, seed=6, step=1e-4)
    assert report.passed, report.witness
    assert report.details["min_eigenvalue"] > 0
    assert report.details["max_boundary_distance_error"] < 1e-6
    assert len(report.series) == 3


def test_levi_radius_probe_reports_scaling() -> None:
    report = levi_radius_probe(radii=(0.1, 0.05))
    assert report.heuristic
    assert all(value > 0 for value in report.details["normalized_eigenvalues"])
    assert len(report.details["scaled_ratios"]) == 1
    assert math.isfinite(report.details["scaled_ratios"][0])
