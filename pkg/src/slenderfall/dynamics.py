"""Quasi-steady sedimentation dynamics in the co-moving frame.

Rigid-body inertia evolves in time while the hydrodynamic loads come from
the steady resistance relation (quasi-steady closure). The state is
(xi, omega, G, Q, c): body-frame velocity and spin, gravity direction seen
from the body, orientation matrix, and inertial-frame position. With the
time/length scaling used throughout, the kinematic equations carry the
Reynolds number as a prefactor:

    m  dxi/dt    = m_e G + f - Re m (omega x xi)
    J  domega/dt = -m_c (r x G) + t - Re (omega x J omega)
    dG/dt = Re (G x omega),  dQ/dt = Re Q [omega x],  dc/dt = Re Q xi.

At Re = 0 only (xi, omega) evolve; G, Q, c are frozen.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InstabilityError, MassModelError
from .freefall import cross_matrix

_BLOWUP_NORM = 1e12


@dataclass(frozen=True)
class FallState:
    t: float
    xi: np.ndarray       # (3,) center-of-mass velocity, body frame
    omega: np.ndarray    # (3,) spin, body frame
    G: np.ndarray        # (3,) gravity direction, body frame, unit
    Q: np.ndarray        # (3,3) orientation (body -> inertial)
    c: np.ndarray        # (3,) center-of-mass position, inertial frame

    @staticmethod
    def from_rest(g_direction=(0.0, 0.0, 1.0)):
        """Release from rest: xi = omega = 0, Q = I, G = g."""
        g = np.asarray(g_direction, dtype=float)
        g = g / np.linalg.norm(g)
        return FallState(t=0.0, xi=np.zeros(3), omega=np.zeros(3), G=g,
                         Q=np.eye(3), c=np.zeros(3))

    def pack(self):
        return np.concatenate([self.xi, self.omega, self.G, self.Q.ravel(), self.c])

    @staticmethod
    def unpack(t, y):
        return FallState(t=t, xi=y[0:3], omega=y[3:6], G=y[6:9],
                         Q=y[9:18].reshape(3, 3), c=y[18:21])


@dataclass(frozen=True)
class DynamicsParams:
    re: float = 0.0
    dt: float = 1e-3
    t_end: float = 1.0
    steady_tol: float = 1e-6
    stride: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dynamics.DynamicsParams: dt and t_end must be positive")
        if self.re < 0:
            raise ValueError("dynamics.DynamicsParams: Re must be >= 0")
        if self.stride < 1:
            raise ValueError("dynamics.DynamicsParams: stride must be >= 1")


def _inertia_pinv(mass_props, resistance, rtol=1e-12):
    """Restricted inverse of J; null directions must be torque-free.

    A straight body has J (and K_rr) singular along its axis; that direction
    carries zero angular acceleration. A null direction of J that does carry
    hydrodynamic torque has no consistent dynamics and raises.
    """
    J = mass_props.inertia
    evals, evecs = np.linalg.eigh(J)
    scale = max(evals.max(), np.finfo(float).tiny)
    null = evals < rtol * scale
    if np.any(null):
        krr_scale = max(np.linalg.norm(resistance.k_rr), np.finfo(float).tiny)
        for v in evecs.T[null]:
            if np.linalg.norm(resistance.k_rr @ v) > 1e-8 * krr_scale:
                raise MassModelError(
                    "dynamics: inertia tensor singular in a direction that "
                    "carries hydrodynamic torque")
    inv = np.where(null, 0.0, 1.0 / np.where(null, 1.0, evals))
    return (evecs * inv) @ evecs.T


def rhs(state, resistance, mass_props, re, _j_pinv=None):
    """Time derivative of the packed state under the quasi-steady closure."""
    xi, omega, G, Q = state.xi, state.omega, state.G, state.Q
    f = -(resistance.k_tt @ xi + resistance.k_tr @ omega)
    t = -(resistance.k_rt @ xi + resistance.k_rr @ omega)
    J = mass_props.inertia
    J_pinv = _inertia_pinv(mass_props, resistance) if _j_pinv is None else _j_pinv

    dxi = (mass_props.m_e * G + f - re * mass_props.m * np.cross(omega, xi)) / mass_props.m
    domega = J_pinv @ (-mass_props.m_c * np.cross(mass_props.r, G) + t
                       - re * np.cross(omega, J @ omega))
    dG = re * np.cross(G, omega)
    dQ = re * Q @ cross_matrix(omega)
    dc = re * Q @ xi
    return np.concatenate([dxi, domega, dG, dQ.ravel(), dc])


def _project(y):
    """Renormalize G and re-orthonormalize Q (polar correction) in place."""
    y[6:9] /= np.linalg.norm(y[6:9])
    q = y[9:18].reshape(3, 3)
    u, _, vt = np.linalg.svd(q)
    y[9:18] = (u @ vt).ravel()
    return y


@dataclass
class Trajectory:
    """Sampled fall states plus metadata from the integration."""

    states: list
    halted_steady: bool = False
    steady_index: Optional[int] = None

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    @property
    def final(self):
        return self.states[-1]

    def to_csv(self, path):
        """Write the trajectory CSV (17 significant digits, header row)."""
        header = ["t",
                  "xi1", "xi2", "xi3", "omega1", "omega2", "omega3",
                  "G1", "G2", "G3", "c1", "c2", "c3",
                  "Q11", "Q12", "Q13", "Q21", "Q22", "Q23", "Q31", "Q32", "Q33"]
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for s in self.states:
                row = np.concatenate([[s.t], s.xi, s.omega, s.G, s.c, s.Q.ravel()])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _family_target(state, steady, resistance, mass_props):
    """Member of a steady family closest in orientation to the given state.

    Symmetric bodies report a whole eigenspace of steady orientations; the
    comparison target is the member whose g is the projection of the current
    gravity direction onto that eigenspace, with xi rebuilt from the
    resistance relation. Simple states are returned as-is.
    """
    if (steady.eigenbasis is None or steady.multiplicity < 2
            or resistance is None or mass_props is None):
        return steady.g, steady.xi, steady.omega
    P = np.asarray(steady.eigenbasis)
    coef = P @ state.G
    if np.linalg.norm(coef) < 1e-12:
        return steady.g, steady.xi, steady.omega
    g = coef @ P
    g = g / np.linalg.norm(g)
    xi = np.linalg.solve(resistance.k_tt,
                         mass_props.m_e * g - steady.lam * (resistance.k_tr @ g))
    return g, xi, steady.lam * g


def _state_mismatch(state, steady, resistance=None, mass_props=None):
    """max(|xi - xi*|, |omega - omega*|, angle(G, +-g*)) against one state."""
    g_s, xi_s, om_s = _family_target(state, steady, resistance, mass_props)
    best = np.inf
    for sign in (1.0, -1.0):
        dxi = np.linalg.norm(state.xi - sign * xi_s)
        dom = np.linalg.norm(state.omega - sign * om_s)
        cosang = np.clip(state.G @ (sign * g_s), -1.0, 1.0)
        ang = float(np.arccos(cosang))
        best = min(best, max(dxi, dom, ang))
    return best


def integrate(state0, resistance, mass_props, params, steady_states=None):
    """Classical fixed-step 4th-order integration of the fall equations.

    After every step G is renormalized and Q is projected back onto the
    rotation group. Sampling happens every ``params.stride`` steps. When a
    list of steady states is supplied, integration halts early once the
    current (xi, omega, G) is within ``params.steady_tol`` of one of them.
    """
    re = params.re
    y = state0.pack().copy()
    t = state0.t
    n_steps = int(np.ceil((params.t_end - t) / params.dt - 1e-12))
    out = [state0]
    halted = False
    steady_index = None
    if steady_states:
        for i, st in enumerate(steady_states):
            if _state_mismatch(state0, st, resistance, mass_props) < params.steady_tol:
                halted = True
                steady_index = i
        if halted:
            return Trajectory(states=out, halted_steady=True,
                              steady_index=steady_index)

    j_pinv = _inertia_pinv(mass_props, resistance)

    def f(ti, yi):
        return rhs(FallState.unpack(ti, yi), resistance, mass_props, re,
                   _j_pinv=j_pinv)

    for step in range(1, n_steps + 1):
        h = params.dt
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        y = _project(y)
        if np.linalg.norm(y) > _BLOWUP_NORM:
            raise InstabilityError(
                f"dynamics.integrate: state norm exceeded {_BLOWUP_NORM:.0e} "
                f"at step {step}", step=step)
        if step % params.stride == 0 or step == n_steps:
            s = FallState.unpack(t, y)
            out.append(s)
            if steady_states:
                for i, st in enumerate(steady_states):
                    if _state_mismatch(s, st, resistance, mass_props) < params.steady_tol:
                        halted = True
                        steady_index = i
                        break
            if halted:
                break
    return Trajectory(states=out, halted_steady=halted, steady_index=steady_index)


def detect_steady(trajectory, steady_states, tol, resistance=None, mass_props=None):
    """Report whether a trajectory approaches any steady state.

    Non-convergence is a finding, not an error: in that case the report
    carries the final residual of the instantaneous force/torque balance
    (when resistance and mass properties are supplied).
    """
    final = trajectory.final
    mismatches = [_state_mismatch(final, st, resistance, mass_props)
                  for st in steady_states]
    best = int(np.argmin(mismatches)) if mismatches else None
    converged = bool(mismatches and mismatches[best] < tol)
    report = {
        "converged": converged,
        "state_index": best if converged else None,
        "mismatch": float(mismatches[best]) if mismatches else None,
        "t_final": final.t,
    }
    if not converged and resistance is not None and mass_props is not None:
        f = -(resistance.k_tt @ final.xi + resistance.k_tr @ final.omega)
        t = -(resistance.k_rt @ final.xi + resistance.k_rr @ final.omega)
        report["final_balance_residual"] = float(max(
            np.linalg.norm(mass_props.m_e * final.G + f),
            np.linalg.norm(mass_props.m_c * np.cross(mass_props.r, final.G) - t)))
    return report
