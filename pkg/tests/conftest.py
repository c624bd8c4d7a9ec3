"""Shared fixtures: reference bodies, kernel parameters, resistance sets."""

import numpy as np
import pytest

from slenderfall import (CurveSpec, KernelParams, discretize, mass_properties,
                         resistance_set)

ELL = 0.1


@pytest.fixture(scope="session")
def params():
    return KernelParams(ell=ELL)


@pytest.fixture(scope="session")
def rod_spec():
    return CurveSpec(kind="rod", length=1.0)


@pytest.fixture(scope="session")
def ring_spec():
    return CurveSpec(kind="ring", radius=1.0)


@pytest.fixture(scope="session")
def helix_spec():
    return CurveSpec(kind="helix", radius=1.0, pitch=1.0, turns=2.0)


@pytest.fixture(scope="session")
def rod_body(rod_spec):
    return discretize(rod_spec, panels=16, order=4)   # N = 64


@pytest.fixture(scope="session")
def ring_body(ring_spec):
    return discretize(ring_spec, panels=16, order=4)  # N = 64


@pytest.fixture(scope="session")
def helix_body(helix_spec):
    return discretize(helix_spec, panels=32, order=6)  # N = 192


@pytest.fixture(scope="session")
def rod_R(rod_body, params):
    return resistance_set(rod_body, params)


@pytest.fixture(scope="session")
def ring_R(ring_body, params):
    return resistance_set(ring_body, params)


@pytest.fixture(scope="session")
def helix_R(helix_body, params):
    return resistance_set(helix_body, params)


@pytest.fixture(scope="session")
def rod_mp(rod_spec, rod_body):
    return mass_properties(rod_spec, rod_body, m_c=0.0)


@pytest.fixture(scope="session")
def ring_mp(ring_spec, ring_body):
    return mass_properties(ring_spec, ring_body, m_c=0.0)


@pytest.fixture(scope="session")
def helix_mp(helix_spec, helix_body):
    return mass_properties(helix_spec, helix_body, m_c=0.0)


def random_polyline_spec(rng, n_vertices=4):
    """A random non-self-intersecting open polyline with unit-scale edges."""
    while True:
        steps = rng.normal(size=(n_vertices - 1, 3))
        steps /= np.linalg.norm(steps, axis=1, keepdims=True)
        verts = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)])
        try:
            return CurveSpec(kind="polyline", vertices=verts)
        except Exception:
            continue
