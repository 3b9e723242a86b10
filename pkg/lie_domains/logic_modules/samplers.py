"""Vectorized random samplers shared by the verification suites.

Every sampler takes an explicit ``numpy.random.Generator``; the suites build
one generator per chunk from a ``SeedSequence`` so that results do not depend
on how chunks are scheduled.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .mat_groups import (
    UniMat2,
    det_batch,
    iwasawa,
    iwasawa_batch,
    renormalize_batch,
)

IDENTITY = np.eye(2, dtype=complex)


def sample_iwasawa_params(
    rng: np.random.Generator, n: int, T: float, N: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """θ ~ U[0, π), s ~ U[-T, T], u ~ U[-N, N]."""
    theta = rng.uniform(0.0, np.pi, size=n)
    s = rng.uniform(-T, T, size=n)
    u = rng.uniform(-N, N, size=n)
    return theta, s, u


def sample_group_batch(rng: np.random.Generator, n: int, T: float, N: float) -> np.ndarray:
    """n elements of PSL(2, R) as an (n, 2, 2) complex array."""
    return iwasawa_batch(*sample_iwasawa_params(rng, n, T, N))


def sample_group_element(rng: np.random.Generator, T: float, N: float) -> UniMat2:
    theta, s, u = sample_iwasawa_params(rng, 1, T, N)
    return iwasawa(float(theta[0]), float(s[0]), float(u[0]))


def _random_unit_matrices(rng: np.random.Generator, n: int) -> np.ndarray:
    raw = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    norms = np.sqrt(np.sum(np.abs(raw) ** 2, axis=(1, 2)))
    return raw / norms[:, None, None]


def sample_near_identity(
    rng: np.random.Generator, n: int, delta: float, *, max_rounds: int = 64
) -> np.ndarray:
    """h in SL(2, C) with |h - I| < delta (Euclidean norm), det-corrected.

    h is drawn as I + δ'·U with U a random unit matrix and δ' ~ U(0, delta), then
    rescaled by 1/sqrt(det h); draws that leave the ball after rescaling are redrawn.
    """
    out = np.empty((n, 2, 2), dtype=complex)
    filled = 0
    for _ in range(max_rounds):
        need = n - filled
        if need == 0:
            break
        radius = rng.uniform(0.0, delta, size=need)
        h = IDENTITY + radius[:, None, None] * _random_unit_matrices(rng, need)
        h = renormalize_batch(h)
        # principal sqrt keeps h near I; the other root lands near -I and is rejected
        distance = np.sqrt(np.sum(np.abs(h - IDENTITY) ** 2, axis=(1, 2)))
        keep = h[distance < delta]
        out[filled : filled + len(keep)] = keep
        filled += len(keep)
    if filled < n:
        raise RuntimeError(f"near-identity sampler filled {filled} of {n} draws")
    return out


def sample_psi_level_set(
    rng: np.random.Generator, n: int, eps: float
) -> np.ndarray:
    """g in SL(2, C) with |ψ(g)| <= eps, parametrized by (b, c, ψ).

    a + d = i(b - c) + ψ and ad = 1 + bc, so a is a root of a quadratic; the
    root is picked at random and computed in the cancellation-free form.
    """
    scale = 10.0 ** rng.uniform(-2.0, 2.0, size=n)
    b = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    c = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    radius = eps * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    w = radius * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=n))

    total = 1j * (b - c) + w
    product = 1.0 + b * c
    root = np.sqrt(total * total - 4.0 * product)
    plus, minus = total + root, total - root
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus) / 2.0
    small = np.divide(product, big, out=np.zeros_like(big), where=big != 0)
    a = np.where(rng.uniform(size=n) < 0.5, big, small)
    d = total - a

    g = np.empty((n, 2, 2), dtype=complex)
    g[:, 0, 0], g[:, 0, 1], g[:, 1, 0], g[:, 1, 1] = a, b, c, d
    return g


def level_set_residuals(g: np.ndarray) -> np.ndarray:
    """|det g - 1| per sample, for screening rounding in the level-set sampler."""
    return np.abs(det_batch(g) - 1.0)


def sample_distinct_triples(
    rng: np.random.Generator,
    n: int,
    *,
    re_max: float = 3.0,
    im_range: Tuple[float, float] = (0.2, 3.0),
    min_separation: float = 1e-3,
) -> np.ndarray:
    """(n, 3) complex array of triples in H^3 with separated components."""
    out = np.empty((n, 3), dtype=complex)
    filled = 0
    while filled < n:
        need = n - filled
        pts = rng.uniform(-re_max, re_max, size=(need, 3)) + 1j * rng.uniform(
            im_range[0], im_range[1], size=(need, 3)
        )
        gaps = np.minimum(
            np.minimum(np.abs(pts[:, 0] - pts[:, 1]), np.abs(pts[:, 0] - pts[:, 2])),
            np.abs(pts[:, 1] - pts[:, 2]),
        )
        keep = pts[gaps > min_separation]
        out[filled : filled + len(keep)] = keep
        filled += len(keep)
    return out


def sample_disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Uniform points of the open disc |z| < radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=n))


def sample_heis_omega(
    rng: np.random.Generator, n: int, a_range: float, b_range: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points (u, v, w) = (a, b, c)·(x, y, z) of Ω = GU with (x, y, z) in U."""
    a = rng.uniform(-a_range, a_range, size=n)
    b = rng.uniform(-b_range, b_range, size=n)
    c = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=n))
    x = sample_disc(rng, n, 1.0)
    y = sample_disc(rng, n, 1.0)
    z = sample_disc(rng, n, 2.0)
    z = np.where(np.abs(z) < 1e-12, 1.0, z)
    return a + x, b + y, c * z * np.exp(1j * a * y)


__all__ = [
    "level_set_residuals",
    "sample_disc",
    "sample_distinct_triples",
    "sample_group_batch",
    "sample_group_element",
    "sample_heis_omega",
    "sample_iwasawa_params",
    "sample_near_identity",
    "sample_psi_level_set",
]
