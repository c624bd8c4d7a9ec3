"""Adherence boundary-integral solver and resistance matrices.

The flow generated by a rigid motion of the body is represented as a single
layer of point forces along the curve, u(x) = sum_q w_q G(x - x_q) phi_q,
collocated at the quadrature nodes (Nystrom). The kernel is bounded on the
diagonal, so no singular quadrature is needed. Solving the collocation
system for the six unit rigid motions yields the resistance blocks with

    f = -(K_tt xi + K_tr omega),   t = -(K_rt xi + K_rr omega),

torque and rotation referenced to the center of mass.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import AssemblyError, ConvergenceError, SingularEvaluationError, SolverError
from .kernel import kernel_scalars

_ZERO_DATA_TOL = 1e-12


def assemble_system(body, params):
    """Dense 3N x 3N Nystrom matrix, block (p,q) = w_q G(x_p - x_q)."""
    x, w = body.nodes, body.weights
    n = body.n_nodes
    d = x[:, None, :] - x[None, :, :]
    r = np.linalg.norm(d, axis=2)
    if n > 1:
        off = r + np.diag(np.full(n, np.inf))
        if off.min() == 0.0:
            raise AssemblyError("mobility.assemble_system: duplicate nodes make "
                                "the collocation system singular")
    A, B = kernel_scalars(r.ravel(), params)
    A = A.reshape(n, n)
    B = B.reshape(n, n)
    rsafe = np.where(r == 0.0, 1.0, r)
    xh = d / rsafe[:, :, None]
    G = A[:, :, None, None] * np.eye(3) + B[:, :, None, None] * (
        xh[:, :, :, None] * xh[:, :, None, :])
    M = (G * w[None, :, None, None]).transpose(0, 2, 1, 3).reshape(3 * n, 3 * n)
    return M


def _factorize(M):
    try:
        lu = sla.lu_factor(M)
    except sla.LinAlgError as exc:
        raise SolverError(f"mobility: factorization failed: {exc}",
                          condition_estimate=np.inf)
    if not np.all(np.isfinite(lu[0])):
        raise SolverError("mobility: factorization produced non-finite factors",
                          condition_estimate=float(np.linalg.cond(M)))
    return lu


def rigid_data(body, xi, omega):
    """Collocation right-hand side xi + omega x x_q, flattened to 3N."""
    return (np.asarray(xi, float)[None, :]
            + np.cross(np.asarray(omega, float), body.nodes)).ravel()


def solve_rigid_problem(body, params, xi, omega, system=None):
    """Line force density and total force/torque for a prescribed rigid motion.

    Returns (phi, f, t) with phi of shape (N,3). Rigid data that vanishes on
    the whole body (e.g. rotation of a straight rod about its own axis) is
    mapped to phi = 0 exactly rather than amplifying roundoff.
    """
    u = rigid_data(body, xi, omega)
    scale = max(np.linalg.norm(xi), np.linalg.norm(omega) * (1 + body.length), 1.0)
    if np.linalg.norm(u) < _ZERO_DATA_TOL * scale:
        phi = np.zeros((body.n_nodes, 3))
        return phi, np.zeros(3), np.zeros(3)
    M = assemble_system(body, params) if system is None else system
    lu = _factorize(M)
    phi = sla.lu_solve(lu, u).reshape(body.n_nodes, 3)
    f, t = force_torque(body, phi)
    return phi, f, t


def force_torque(body, phi):
    """Total hydrodynamic force and torque from a line force density.

    The stress divergence is minus the line measure with density phi, so the
    force on the body is f = -sum w_q phi_q and the torque about the center
    of mass is t = -sum w_q x_q x phi_q.
    """
    w = body.weights[:, None]
    f = -(w * phi).sum(axis=0)
    t = -(w * np.cross(body.nodes, phi)).sum(axis=0)
    return f, t


@dataclass(frozen=True)
class ResistanceSet:
    """The four 3x3 resistance blocks and their 6x6 grand matrix."""

    k_tt: np.ndarray
    k_tr: np.ndarray
    k_rt: np.ndarray
    k_rr: np.ndarray
    grand: np.ndarray        # (6,6) symmetrized
    asymmetry: float         # relative asymmetry before symmetrization
    ell: float
    mu: float
    n_nodes: int
    shape_hash: str

    def to_dict(self):
        return {
            "k_tt": self.k_tt.tolist(),
            "k_tr": self.k_tr.tolist(),
            "k_rt": self.k_rt.tolist(),
            "k_rr": self.k_rr.tolist(),
            "asymmetry": self.asymmetry,
            "ell": self.ell,
            "mu": self.mu,
            "n_nodes": self.n_nodes,
            "shape_hash": self.shape_hash,
        }


def resistance_set(body, params, asymmetry_tol=1e-6):
    """Assemble the grand resistance matrix from six unit rigid solves.

    One factorization, six right-hand sides (unit translations and unit
    rotations). The grand matrix is checked for reciprocity and then
    symmetrized by averaging; asymmetry above the tolerance indicates a
    discretization problem and raises instead of being masked.
    """
    M = assemble_system(body, params)
    lu = _factorize(M)
    x, w = body.nodes, body.weights
    n = body.n_nodes
    eye = np.eye(3)

    A6 = np.zeros((6, 6))
    for j in range(6):
        if j < 3:
            u = rigid_data(body, eye[j], np.zeros(3))
        else:
            u = rigid_data(body, np.zeros(3), eye[j - 3])
            if np.linalg.norm(u) < _ZERO_DATA_TOL * (1 + body.length):
                continue  # straight-body axial rotation: zero column
        phi = sla.lu_solve(lu, u).reshape(n, 3)
        A6[:3, j] = (w[:, None] * phi).sum(axis=0)
        A6[3:, j] = (w[:, None] * np.cross(x, phi)).sum(axis=0)

    norm = np.linalg.norm(A6)
    asym = float(np.linalg.norm(A6 - A6.T) / norm) if norm > 0 else 0.0
    if asym > asymmetry_tol:
        raise ConvergenceError(
            f"mobility.resistance_set: grand matrix asymmetry {asym:.3e} exceeds "
            f"{asymmetry_tol:.1e}; discretization too coarse")
    A6 = 0.5 * (A6 + A6.T)
    return ResistanceSet(k_tt=A6[:3, :3], k_tr=A6[:3, 3:], k_rt=A6[3:, :3],
                         k_rr=A6[3:, 3:], grand=A6, asymmetry=asym,
                         ell=params.ell, mu=params.mu, n_nodes=n,
                         shape_hash=body.shape_hash())


def evaluate_flow(body, phi, x, params, with_pressure=True):
    """Velocity and pressure of the single-layer field at a point x.

    The velocity is defined everywhere (the kernel is bounded); the pressure
    kernel is singular on the curve, so requesting the pressure at a
    collocation node raises. Pass ``with_pressure=False`` to evaluate only
    the velocity, e.g. on the body itself.
    """
    x = np.asarray(x, dtype=float)
    d = x[None, :] - body.nodes
    r = np.linalg.norm(d, axis=1)
    A, B = kernel_scalars(r, params)
    rsafe = np.where(r == 0.0, 1.0, r)
    xh = d / rsafe[:, None]
    wphi = body.weights[:, None] * phi
    u = (A[:, None] * wphi).sum(axis=0) + xh.T @ (B * (xh * wphi).sum(axis=1))
    if not with_pressure:
        return u, None
    if np.any(r == 0.0):
        raise SingularEvaluationError("mobility.evaluate_flow: pressure evaluation "
                                      "at a collocation node")
    p = float((body.weights * (d * phi).sum(axis=1) / (4.0 * np.pi * r ** 3)).sum())
    return u, p


def energy_dissipation(zeta6, resistance):
    """Instantaneous dissipation rate of the rigid motion (xi, omega)."""
    z = np.asarray(zeta6, dtype=float)
    return float(z @ resistance.grand @ z)
