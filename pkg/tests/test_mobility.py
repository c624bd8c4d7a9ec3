"""Mobility module: collocation system, rigid solves, resistance matrices."""

import numpy as np
import pytest

from slenderfall import (DiscreteBody, KernelParams, assemble_system, discretize,
                         energy_dissipation, evaluate_flow, force_torque,
                         resistance_set, solve_rigid_problem)
from slenderfall.errors import AssemblyError, SingularEvaluationError


def single_node_body(weight=0.25):
    return DiscreteBody(nodes=np.zeros((1, 3)), weights=np.array([weight]),
                        arclength=np.array([0.0]), density=np.array([1.0]),
                        panels=1, order=2, length=weight)


def test_single_node_system():
    p = KernelParams(ell=0.5, mu=2.0)
    w = 0.25
    M = assemble_system(single_node_body(w), p)
    assert np.allclose(M, w * np.eye(3) / (6 * np.pi * p.mu * p.ell), rtol=1e-12)


def test_equal_weight_symmetry(params):
    # with equal node weights the full matrix is symmetric, G being even
    n = 24
    th = 2 * np.pi * np.arange(n) / n
    nodes = np.stack([np.cos(th), np.sin(th), 0 * th], axis=1)
    w = np.full(n, 2 * np.pi / n)
    body = DiscreteBody(nodes=nodes, weights=w, arclength=th, density=np.ones(n),
                        panels=n, order=2, length=float(w.sum()))
    M = assemble_system(body, params)
    assert np.linalg.norm(M - M.T) <= 1e-12 * np.linalg.norm(M)


def test_duplicate_nodes_raise(params):
    body = DiscreteBody(nodes=np.zeros((2, 3)), weights=np.ones(2),
                        arclength=np.array([0.0, 1.0]), density=np.ones(2),
                        panels=1, order=2, length=2.0)
    with pytest.raises(AssemblyError):
        assemble_system(body, params)


def test_zero_motion_zero_force(rod_body, params):
    phi, f, t = solve_rigid_problem(rod_body, params, np.zeros(3), np.zeros(3))
    assert np.all(phi == 0) and np.all(f == 0) and np.all(t == 0)


def test_single_node_drag():
    p = KernelParams(ell=0.5, mu=2.0)
    phi, f, t = solve_rigid_problem(single_node_body(), p, [1.0, 0, 0], np.zeros(3))
    assert np.allclose(f, [-6 * np.pi * p.mu * p.ell, 0, 0], rtol=1e-12)
    assert np.allclose(t, 0)


def test_straight_rod_axial_spin_free(rod_body, params):
    phi, f, t = solve_rigid_problem(rod_body, params, np.zeros(3), [1.0, 0, 0])
    assert np.all(phi == 0) and np.all(f == 0) and np.all(t == 0)


def test_reciprocity(rod_R, ring_R, helix_R):
    for R in (rod_R, ring_R, helix_R):
        assert R.asymmetry <= 1e-8
        assert np.allclose(R.grand, R.grand.T)
        assert np.allclose(R.k_tr, R.k_rt.T)


def test_positivity(rod_R, ring_R, helix_R):
    for R in (rod_R, ring_R, helix_R):
        assert np.linalg.eigvalsh(R.k_tt).min() > 0
        scale = np.linalg.norm(R.grand)
        assert np.linalg.eigvalsh(R.grand).min() >= -1e-10 * scale
    # strict positivity for the non-straight bodies
    for R in (ring_R, helix_R):
        assert np.linalg.eigvalsh(R.grand).min() > 0


def test_rod_grand_matrix_axial_null(rod_R):
    # axial rotation of a straight rod generates no boundary data
    e_axis = np.array([0, 0, 0, 1.0, 0, 0])
    assert np.linalg.norm(rod_R.grand @ e_axis) == 0.0


def test_ring_no_coupling(ring_R):
    assert np.linalg.norm(ring_R.k_tr) <= 1e-8 * np.linalg.norm(ring_R.k_tt)


def test_helix_coupling_present(helix_R):
    assert np.linalg.norm(helix_R.k_tr) > 1e-2 * np.linalg.norm(helix_R.k_tt)


def test_force_density_identity(rod_body, rod_R, params):
    phi, f, t = solve_rigid_problem(rod_body, params, [1.0, 0, 0], np.zeros(3))
    assert np.allclose(f, -rod_R.k_tt @ [1.0, 0, 0], rtol=1e-8)
    assert np.allclose(t, -rod_R.k_rt @ [1.0, 0, 0], atol=1e-8 * np.abs(f).max())


def test_refinement_cauchy(rod_spec, params):
    grands = []
    for panels in (4, 8, 16):
        body = discretize(rod_spec, panels, order=4)
        grands.append(resistance_set(body, params).grand)
    d1 = np.linalg.norm(grands[1] - grands[0])
    d2 = np.linalg.norm(grands[2] - grands[1])
    assert d2 < d1


def test_evaluate_flow_collocation_identity(ring_body, params):
    xi, omega = np.array([0.2, -0.1, 0.4]), np.array([0.3, 0.0, -0.2])
    phi, _, _ = solve_rigid_problem(ring_body, params, xi, omega)
    q = 7
    xq = ring_body.nodes[q]
    u, p = evaluate_flow(ring_body, phi, xq, params, with_pressure=False)
    assert np.allclose(u, xi + np.cross(omega, xq), rtol=1e-10, atol=1e-12)
    assert p is None
    with pytest.raises(SingularEvaluationError):
        evaluate_flow(ring_body, phi, xq, params)


def test_evaluate_flow_far_field_decay(rod_body, params):
    phi, _, _ = solve_rigid_problem(rod_body, params, [0, 0, 1.0], np.zeros(3))
    u1, p1 = evaluate_flow(rod_body, phi, np.array([1e3, 0, 0]), params)
    u2, p2 = evaluate_flow(rod_body, phi, np.array([2e3, 0, 0]), params)
    ratio = np.linalg.norm(u2) / np.linalg.norm(u1)
    assert 0.5 * 0.8 <= ratio <= 0.5 * 1.2
    assert np.isfinite(p1) and np.isfinite(p2)


def test_evaluate_flow_zero_density(rod_body, params):
    u, p = evaluate_flow(rod_body, np.zeros((rod_body.n_nodes, 3)),
                         np.array([1.0, 2.0, 3.0]), params)
    assert np.all(u == 0) and p == 0.0


def test_energy_dissipation(rod_R, ring_R):
    assert energy_dissipation(np.zeros(6), ring_R) == 0.0
    z = np.zeros(6)
    z[0] = 1.0
    assert energy_dissipation(z, ring_R) == pytest.approx(ring_R.k_tt[0, 0])
    assert energy_dissipation(z, ring_R) > 0
    # straight rod spun about its own axis dissipates nothing
    axial = np.zeros(6)
    axial[3] = 1.0
    assert energy_dissipation(axial, rod_R) == 0.0


def test_resistance_metadata(ring_body, ring_R, params):
    assert ring_R.n_nodes == ring_body.n_nodes
    assert ring_R.ell == params.ell and ring_R.mu == params.mu
    assert ring_R.shape_hash == ring_body.shape_hash()
    d = ring_R.to_dict()
    assert np.allclose(np.array(d["k_tt"]), ring_R.k_tt)
