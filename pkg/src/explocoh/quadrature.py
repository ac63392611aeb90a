"""Adaptive quadrature for the chart integrals.

One axis per chart coordinate: angles live on [0, 2pi]; log-radius axes are
integrated through the substitution u = e^r, which turns the decay bound
|f| <= c e^(delta r) into an endpoint-singular but integrable problem on
(0, inf) handled with dyadically graded panels toward u = 0; real-line
axes use dyadically expanding panels.  Refinement doubles the panel count
and extends the covered range at the same time, so an integrand whose tail
carries mass (the divergent fixtures) never settles and trips the depth
limit instead of silently truncating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceSuspectedError, ShapeError


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for the numeric integrals."""

    tolerance: float = 1e-6
    nodes_per_panel: int = 12
    max_depth: int = 20

    def axis_tolerance(self, n_axes):
        return self.tolerance / (4.0 * max(1, n_axes))


def _gauss_panels(bounds, nodes):
    """Gauss-Legendre points and weights over consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    pts = []
    wts = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        pts.append(mid + half * x)
        wts.append(half * w)
    return np.concatenate(pts), np.concatenate(wts)


def _split(bounds, pieces):
    out = [bounds[0]]
    for a, b in zip(bounds[:-1], bounds[1:]):
        step = (b - a) / pieces
        out.extend(a + step * (k + 1) for k in range(pieces))
    return out


class Axis:
    """One coordinate axis; produces (points, weights) at a refinement level.

    kind is one of "circle", "uline" (log-radius via u = e^r), "line",
    "negline" (the boundary factor (-inf, 0]).  Points are returned in the
    original coordinate; weights absorb the substitution jacobian.
    """

    def __init__(self, kind, nodes=12):
        if kind not in ("circle", "uline", "line", "negline"):
            raise ShapeError("unknown axis kind %r" % (kind,))
        self.kind = kind
        self.nodes = nodes

    def points_weights(self, level):
        split = 2 ** min(level, 4)
        if self.kind == "circle":
            bounds = _split([0.0, 2.0 * np.pi], 2 * split)
            return _gauss_panels(bounds, self.nodes)
        if self.kind == "uline":
            lo_oct = 24 + 8 * level
            hi_oct = 7 + 2 * level
            octaves = [2.0**j for j in range(-lo_oct, hi_oct + 1)]
            bounds = _split(octaves, split)
            u, w = _gauss_panels(bounds, self.nodes)
            return np.log(u), w / u
        if self.kind == "line":
            reach = 7 + 2 * level
            bounds = sorted(
                {-(2.0**j) for j in range(reach + 1)}
                | {0.0}
                | {2.0**j for j in range(reach + 1)}
            )
            bounds = _split(sorted(bounds), split)
            return _gauss_panels(bounds, self.nodes)
        reach = 7 + 2 * level
        bounds = sorted({-(2.0**j) for j in range(reach + 1)} | {0.0})
        bounds = _split(bounds, split)
        return _gauss_panels(bounds, self.nodes)


def integrate_1d(fn, axis, spec, tol=None):
    """(value, bound) for a 1-D integral; fn maps an ndarray to an ndarray."""
    tol = spec.tolerance if tol is None else tol
    prev = None
    for level in range(spec.max_depth):
        pts, wts = axis.points_weights(level)
        val = float(np.dot(np.asarray(fn(pts), dtype=float), wts))
        if prev is not None and abs(val - prev) <= tol:
            return val, abs(val - prev)
        prev = val
    raise DivergenceSuspectedError(
        "axis %s: refinement did not converge within depth %d" % (axis.kind, spec.max_depth)
    )


def integrate_product(fns_axes, spec):
    """Product of 1-D integrals with combined error bound.

    fns_axes is a list of (fn, axis); returns (value, bound) where bound is
    the first-order propagation of the per-axis refinement bounds.
    """
    tol = spec.axis_tolerance(len(fns_axes))
    values = []
    bounds = []
    for fn, axis in fns_axes:
        v, b = integrate_1d(fn, axis, spec, tol=tol)
        values.append(v)
        bounds.append(b)
    total = 1.0
    for v in values:
        total *= v
    worst = 1.0
    for v, b in zip(values, bounds):
        worst *= abs(v) + b
    return total, abs(worst - abs(total))


def integrate_tensor(fn, axes, spec, point_cap=2_000_000):
    """Full tensor-grid integration for non-separable integrands.

    fn receives one flat ndarray per axis (a meshgrid evaluation) and
    returns the integrand values.
    """
    prev = None
    for level in range(spec.max_depth):
        grids = [axis.points_weights(level) for axis in axes]
        sizes = [len(p) for p, _ in grids]
        total = 1
        for s in sizes:
            total *= s
        if total > point_cap:
            raise DivergenceSuspectedError(
                "tensor grid of %d points exceeds the evaluation cap" % total
            )
        mesh = np.meshgrid(*[p for p, _ in grids], indexing="ij")
        vals = np.asarray(fn(*[m.ravel() for m in mesh]), dtype=float).reshape(sizes)
        for axis_idx in range(len(axes) - 1, -1, -1):
            vals = np.tensordot(vals, grids[axis_idx][1], axes=([axis_idx], [0]))
        val = float(vals)
        if prev is not None and abs(val - prev) <= spec.tolerance:
            return val, abs(val - prev)
        prev = val
    raise DivergenceSuspectedError(
        "tensor refinement did not converge within depth %d" % spec.max_depth
    )
