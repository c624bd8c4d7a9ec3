"""One-dimensional rigid bodies: curve shapes, quadrature, mass properties.

Bodies are curves in R^3 (rod, ring, helix, or polyline). They are
discretized with composite Gauss-Legendre panels; the same nodes carry both
the hydrodynamic collocation and the mass quadrature. All node coordinates
live in the co-moving frame, centered at the (mass-weighted) center of mass.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import GeometryError

_KINDS = ("rod", "ring", "helix", "polyline")


@dataclass(frozen=True)
class CurveSpec:
    """Shape description of a one-dimensional rigid body.

    The optional ``density`` is a linear mass density profile rho(s), with s
    the arc length measured from the start of the curve; ``None`` means
    uniform density 1.
    """

    kind: str
    length: float = 0.0                      # rod
    radius: float = 0.0                      # ring, helix
    pitch: float = 0.0                       # helix
    turns: float = 0.0                       # helix
    vertices: Optional[np.ndarray] = None    # polyline, (V,3)
    closed: bool = False
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GeometryError(f"geometry.CurveSpec: unknown kind {self.kind!r}")
        if self.kind == "rod" and self.length <= 0:
            raise GeometryError("geometry.CurveSpec: rod length must be positive")
        if self.kind == "ring" and self.radius <= 0:
            raise GeometryError("geometry.CurveSpec: ring radius must be positive")
        if self.kind == "helix":
            if self.radius <= 0 or self.turns <= 0 or self.pitch < 0:
                raise GeometryError("geometry.CurveSpec: helix needs radius > 0, "
                                    "turns > 0, pitch >= 0")
        if self.kind == "polyline":
            v = np.asarray(self.vertices, dtype=float)
            if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 2:
                raise GeometryError("geometry.CurveSpec: polyline needs a (V,3) "
                                    "vertex array with V >= 2")
            object.__setattr__(self, "vertices", v)
            seg = np.diff(v, axis=0)
            if np.any(np.linalg.norm(seg, axis=1) == 0):
                raise GeometryError("geometry.CurveSpec: zero-length polyline segment")
            _check_polyline_injective(v, self.closed)

    def segments(self):
        """Piecewise-constant-speed parametrization, one entry per C^1 arc.

        Returns a list of (point(t), speed) with t in [0,1] per segment. All
        built-in shapes have constant parametric speed, which makes arc
        length linear in t on each segment.
        """
        if self.kind == "rod":
            L = self.length
            return [(lambda t: np.stack([L * (t - 0.5), 0 * t, 0 * t], axis=-1), L)]
        if self.kind == "ring":
            R = self.radius

            def ring(t):
                th = 2 * np.pi * t
                return np.stack([R * np.cos(th), R * np.sin(th), 0 * t], axis=-1)

            return [(ring, 2 * np.pi * R)]
        if self.kind == "helix":
            R, p, n = self.radius, self.pitch, self.turns

            def helix(t):
                th = 2 * np.pi * n * t
                return np.stack([R * np.cos(th), R * np.sin(th), p * n * t], axis=-1)

            return [(helix, n * np.sqrt((2 * np.pi * R) ** 2 + p ** 2))]
        # polyline: one segment per edge
        verts = self.vertices
        if self.closed:
            verts = np.vstack([verts, verts[:1]])
        segs = []
        for a, b in zip(verts[:-1], verts[1:]):
            a, b = a.copy(), b.copy()
            segs.append((lambda t, a=a, b=b: a + np.multiply.outer(t, b - a),
                         float(np.linalg.norm(b - a))))
        return segs

    @property
    def is_closed(self):
        return self.kind == "ring" or (self.kind == "polyline" and self.closed)


@dataclass(frozen=True)
class DiscreteBody:
    """Quadrature discretization of a curve, centered at the center of mass."""

    nodes: np.ndarray        # (N,3)
    weights: np.ndarray      # (N,) arc length weights
    arclength: np.ndarray    # (N,) arc length coordinate of each node
    density: np.ndarray      # (N,) rho(s) at each node
    panels: int
    order: int
    length: float            # total discrete arc length, sum of weights

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    def shape_hash(self):
        import hashlib
        h = hashlib.sha1()
        h.update(np.ascontiguousarray(self.nodes).tobytes())
        h.update(np.ascontiguousarray(self.weights).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class MassProperties:
    """Mass, effective/complementary masses, centroid offset, inertia tensor."""

    m: float
    m_c: float
    m_e: float
    r: np.ndarray            # (3,) uniform-measure centroid offset
    inertia: np.ndarray      # (3,3) symmetric PSD, about the center of mass


def _check_polyline_injective(verts, closed):
    """Reject self-intersecting polylines (non-adjacent segment contact)."""
    v = np.vstack([verts, verts[:1]]) if closed else verts
    n = v.shape[0] - 1
    scale = max(np.ptp(v, axis=0).max(), 1e-30)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (closed and i == 0 and j == n - 1)
            if adjacent:
                continue
            if _segment_distance(v[i], v[i + 1], v[j], v[j + 1]) < 1e-9 * scale:
                raise GeometryError(
                    f"geometry: polyline self-intersects (segments {i} and {j})")


def _segment_distance(p1, p2, q1, q2):
    """Minimum distance between segments [p1,p2] and [q1,q2]."""
    d1, d2, r = p2 - p1, q2 - q1, p1 - q1
    a, e, f = d1 @ d1, d2 @ d2, d2 @ r
    b, c = d1 @ d2, d1 @ r
    den = a * e - b * b
    s = np.clip((b * f - c * e) / den, 0.0, 1.0) if den > 1e-14 * a * e else 0.0
    t = (b * s + f) / e if e > 0 else 0.0
    if t < 0.0 or t > 1.0:
        t = np.clip(t, 0.0, 1.0)
        s = np.clip((b * t - c) / a, 0.0, 1.0) if a > 0 else 0.0
    return float(np.linalg.norm(p1 + s * d1 - (q1 + t * d2)))


def discretize(spec, panels, order):
    """Composite Gauss-Legendre discretization of a curve.

    ``panels`` is the total panel count; for polylines the panels are
    distributed over the edges proportionally to edge length, at least one
    per edge and never straddling a vertex. Nodes are re-centered so that
    the discrete mass-weighted mean position is zero.
    """
    if panels < 1:
        raise GeometryError("geometry.discretize: panels must be >= 1")
    if not (2 <= order <= 16):
        raise GeometryError("geometry.discretize: order must be in 2..16")
    segs = spec.segments()
    lengths = np.array([L for _, L in segs])
    if lengths.sum() <= 0:
        raise GeometryError("geometry.discretize: zero-length curve")

    # distribute panels over segments, >= 1 each
    if len(segs) == 1:
        counts = [panels]
    else:
        counts = np.maximum(1, np.round(panels * lengths / lengths.sum()).astype(int))

    xg, wg = np.polynomial.legendre.leggauss(order)
    nodes, weights, arcs = [], [], []
    s0 = 0.0
    for (curve, L), npan in zip(segs, counts):
        edges = np.linspace(0.0, 1.0, npan + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            t = mid + half * xg
            nodes.append(curve(t))
            weights.append(half * wg * L)
            arcs.append(s0 + t * L)       # constant speed on every segment
        s0 += L
    x = np.vstack(nodes)
    w = np.concatenate(weights)
    s = np.concatenate(arcs)

    rho = np.ones_like(s) if spec.density is None else np.asarray(spec.density(s), float)
    if np.any(rho <= 0):
        raise GeometryError("geometry.discretize: density profile must be positive")

    mass_w = w * rho
    x = x - (mass_w[:, None] * x).sum(axis=0) / mass_w.sum()
    return DiscreteBody(nodes=x, weights=w, arclength=s, density=rho,
                        panels=int(np.sum(counts)), order=order,
                        length=float(w.sum()))


def mass_properties(spec, body, m_c=0.0):
    """Mass, centroid offset and inertia tensor of a discretized body.

    The centroid offset r uses the uniform arc-length measure regardless of
    the density profile; the inertia tensor is mass-weighted and taken about
    the center of mass (the origin of the body frame).
    """
    if m_c < 0:
        raise GeometryError("geometry.mass_properties: m_c must be >= 0")
    w, rho, x = body.weights, body.density, body.nodes
    m = float((w * rho).sum())
    r = (w[:, None] * x).sum(axis=0) / body.length
    wr = w * rho
    sq = (x * x).sum(axis=1)
    J = np.einsum("q,ij->ij", wr * sq, np.eye(3)) - np.einsum("q,qi,qj->ij", wr, x, x)
    J = 0.5 * (J + J.T)
    return MassProperties(m=m, m_c=float(m_c), m_e=m - float(m_c), r=r, inertia=J)


@dataclass(frozen=True)
class GeometryDiagnostics:
    min_separation: float
    separation_over_thickness: float
    straightness: float      # max node distance from best-fit line / length
    closed: bool
    duplicate_nodes: bool
    warnings: tuple = field(default=())


def validate_geometry(body, ell):
    """Diagnostic report on a discretization relative to the thickness ell."""
    x = body.nodes
    n = body.n_nodes
    if n > 1:
        d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
        d[np.diag_indices(n)] = np.inf
        min_sep = float(d.min())
    else:
        min_sep = np.inf

    # straightness: residual from the principal axis through the centroid
    xc = x - x.mean(axis=0)
    if n > 1:
        _, _, vt = np.linalg.svd(xc, full_matrices=False)
        axis = vt[0]
        resid = np.linalg.norm(xc - np.outer(xc @ axis, axis), axis=1)
        straightness = float(resid.max() / body.length)
    else:
        straightness = 0.0

    # closedness heuristic: first and last nodes nearer than the mean spacing
    spacing = body.length / max(n - 1, 1)
    closed = bool(np.linalg.norm(x[0] - x[-1]) < 2.0 * spacing) if n > 2 else False

    warnings = []
    duplicate = min_sep == 0.0
    if duplicate:
        warnings.append("duplicate nodes: zero inter-node separation")
    elif min_sep < ell / 10.0:
        warnings.append(f"minimum node separation {min_sep:.3e} is below "
                        f"ell/10 = {ell / 10.0:.3e}; quadrature accuracy degrades")
    return GeometryDiagnostics(min_separation=min_sep,
                               separation_over_thickness=min_sep / ell,
                               straightness=straightness, closed=closed,
                               duplicate_nodes=duplicate, warnings=tuple(warnings))


def load_polyline_csv(path, closed=False, density=None):
    """Read a polyline CurveSpec from a CSV of x,y,z vertex rows."""
    verts = np.loadtxt(path, delimiter=",", ndmin=2)
    if verts.shape[1] != 3:
        raise GeometryError(f"geometry: polyline CSV {path} must have 3 columns")
    return CurveSpec(kind="polyline", vertices=verts, closed=closed, density=density)
