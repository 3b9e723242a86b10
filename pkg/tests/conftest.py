"""Pytest configuration helpers for the lie-domains project.

Conventions and fixtures
- `base_triple` : the default base point ζ = (i, 1+i, 2i) of the orbit map.
- `rng` : a fresh seeded ``numpy.random.Generator`` per test.
- `settings` : the parsed ``config/verify_settings.yaml`` (cached).
- `small_settings` : a copy of the settings with reduced sample sizes, for
    orchestrator tests that should finish in seconds.

Monte-Carlo acceptance sizes are exercised by the CLI; tests call the same
functions with reduced sample counts.
"""

from __future__ import annotations

import sys
from pathlib import Path


def _ensure_project_root_on_path() -> None:
    project_root = Path(__file__).resolve().parents[1]
    project_root_str = str(project_root)
    if project_root_str not in sys.path:
        sys.path.insert(0, project_root_str)


_ensure_project_root_on_path()

import numpy as np
import pytest

from lie_domains.logic_modules.mat_groups import DEFAULT_ZETA, Triple
from lie_domains.utils.settings import VerifyConfig, get_verify_config


@pytest.fixture
def base_triple() -> Triple:
    return DEFAULT_ZETA


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def settings() -> VerifyConfig:
    return get_verify_config()


@pytest.fixture
def small_settings(settings: VerifyConfig) -> VerifyConfig:
    reduced = settings.model_copy(deep=True)
    reduced.sampling.chunk_size = 2_000
    reduced.sampling.workers = 1
    reduced.lemma.trials = 5_000
    reduced.lemma.claim_trials = 5_000
    reduced.lemma.contrast_trials = 5_000
    reduced.geometry.random_triples = 50
    reduced.geometry.free_triples = 5
    reduced.geometry.proper_rays = 4
    reduced.tube.levi_samples = 4
    reduced.cover.instances = 4
    reduced.cover.bound_samples = 200
    reduced.heisenberg.membership_points = 200
    reduced.heisenberg.audit_samples = 4_000
    reduced.heisenberg.map_samples = 200
    return reduced
