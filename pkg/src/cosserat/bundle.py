"""Frame bundle over the spatial domain.

Media connection, horizontal/vertical splitting, the bundle metric, motion
fields that project to the body, and the rate-of-deformation tensor.

Six-component vectors are expressed in the ``(p1..p3, E1..E3)`` frame and
six-component coforms in the ``(d1..d3, W1..W3)`` coframe, matching the
row/column conventions of :class:`~cosserat.tensors.MixedTensor`.
"""

from __future__ import annotations

import inspect
from dataclasses import dataclass, field

import numpy as np

from .metric import AlphaCoefficients, InertiaSpectrum, covariant_differential_frame
from .so3 import CHART_RADIUS, ChartBoundary, left_invariant_frame
from .tensors import MixedTensor, trace_full, trace_vertical  # noqa: F401

__all__ = [
    "MediaConnectionForm", "BundlePoint", "ProjectableField",
    "FieldDerivatives", "MixedTensor", "trace_full", "trace_vertical",
    "horizontal_frame", "theta_forms", "split_vector", "assemble_vector",
    "metric_mu", "finite_difference_evaluator", "deformation_tensor",
]


@dataclass(frozen=True)
class MediaConnectionForm:
    """Constant coefficients w_ij of the media connection (homogeneous).

    Row i holds the d-basis coefficients of the connection 1-form w_i.
    The array is stored per evaluation call, so an x-dependent connection
    is a non-breaking extension.
    """

    omega: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    homogeneous: bool = True

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.shape != (3, 3):
            raise ValueError(f"expected a 3x3 coefficient array, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("connection coefficients must be finite")
        object.__setattr__(self, "omega", w)

    @classmethod
    def zero(cls) -> "MediaConnectionForm":
        return cls(np.zeros((3, 3)))


@dataclass(frozen=True)
class BundlePoint:
    """A point of the bundle: base position x and fiber chart coordinates y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != (3,) or y.shape != (3,):
            raise ValueError("bundle point needs two 3-vectors")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("bundle point coordinates must be finite")
        if np.linalg.norm(y) >= CHART_RADIUS:
            raise ChartBoundary(
                f"fiber coordinates |y| = {np.linalg.norm(y):.6f} outside the chart ball")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


def _positional_arity(fn) -> int:
    # required positional parameters only; defaulted ones are bindings
    sig = inspect.signature(fn)
    count = 0
    for p in sig.parameters.values():
        if p.kind in (inspect.Parameter.POSITIONAL_ONLY,
                      inspect.Parameter.POSITIONAL_OR_KEYWORD):
            if p.default is inspect.Parameter.empty:
                count += 1
        elif p.kind is inspect.Parameter.VAR_POSITIONAL:
            return -1
    return count


@dataclass(frozen=True)
class ProjectableField:
    """Motion field U = sum_i X_i(x) p_i + Y_i(x, y) E_i.

    The horizontal components may only depend on the base point, so the
    field projects to a velocity field on the body: X entries must be
    callables of x alone, Y entries callables of (x, y).  Construction
    rejects X components declared with a fiber argument.
    """

    X: tuple
    Y: tuple

    def __post_init__(self):
        if len(self.X) != 3 or len(self.Y) != 3:
            raise ValueError("need three X components and three Y components")
        for i, fn in enumerate(self.X):
            arity = _positional_arity(fn)
            if arity != 1:
                raise ValueError(
                    f"X[{i}] must be a function of the base point only "
                    f"(one positional argument, got {arity}); "
                    "a fiber-dependent horizontal component is not projectable")
        for i, fn in enumerate(self.Y):
            if _positional_arity(fn) != 2:
                raise ValueError(f"Y[{i}] must be a function of (x, y)")

    def evaluate(self, point: BundlePoint) -> tuple[np.ndarray, np.ndarray]:
        xv = np.array([float(fn(point.x)) for fn in self.X])
        yv = np.array([float(fn(point.x, point.y)) for fn in self.Y])
        return xv, yv


def horizontal_frame(conn: MediaConnectionForm) -> np.ndarray:
    """Horizontal lifts h_i = p_i - sum_j w_ji E_j, one per row (3x6)."""
    h = np.zeros((3, 6))
    h[:, :3] = np.eye(3)
    h[:, 3:] = -conn.omega.T
    return h


def theta_forms(conn: MediaConnectionForm) -> np.ndarray:
    """Vertical coforms theta_i = W_i + sum_j w_ij d_j, one per row (3x6).

    The third row carries W3 (the only reading that makes the triple a
    coframe of the vertical dual).  Their common kernel is the horizontal
    distribution spanned by :func:`horizontal_frame`.
    """
    th = np.zeros((3, 6))
    th[:, :3] = conn.omega
    th[:, 3:] = np.eye(3)
    return th


def split_vector(conn: MediaConnectionForm, u) -> tuple[np.ndarray, np.ndarray]:
    """Split a 6-vector into (horizontal coefficients a, vertical b).

    a_i multiplies h_i and b_j = theta_j(u) multiplies E_j; reassembly via
    :func:`assemble_vector` is exact.
    """
    uu = np.asarray(u, dtype=float)
    a = uu[:3].copy()
    b = uu[3:] + conn.omega @ uu[:3]
    return a, b


def assemble_vector(conn: MediaConnectionForm, a, b) -> np.ndarray:
    """Inverse of :func:`split_vector`: sum a_i h_i + sum b_j E_j."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(6)
    out[:3] = a
    out[3:] = b - conn.omega @ a
    return out


def metric_mu(lam: InertiaSpectrum, conn: MediaConnectionForm, u, v) -> float:
    """Bundle metric on 6-vectors in the (p, E) basis.

    Euclidean on the horizontal split, the inertia metric on the vertical
    split; the frame (h_1..h_3, E_1..E_3) is orthogonal for it.
    """
    au, bu = split_vector(conn, u)
    av, bv = split_vector(conn, v)
    return float(au @ av + np.sum(lam.as_array() * bu * bv))


@dataclass(frozen=True)
class FieldDerivatives:
    """First derivatives of a motion field at a bundle point.

    dx_x[i, j] = p_j(X_i), dx_y[i, j] = p_j(Y_i), ey_y[i, j] = E_j(Y_i).
    """

    dx_x: np.ndarray
    dx_y: np.ndarray
    ey_y: np.ndarray


def finite_difference_evaluator(u_field: ProjectableField, step: float = 1e-6):
    """Second-order central-difference derivative backend for analytic fields.

    Fiber derivatives combine the coordinate gradient in y with the frame
    coefficients: E_j(f) = sum_k M(y)[k, j] df/dy_k.
    """

    def evaluate(point: BundlePoint) -> FieldDerivatives:
        x, y = point.x, point.y
        dx_x = np.zeros((3, 3))
        dx_y = np.zeros((3, 3))
        grad_y = np.zeros((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = step
            for i in range(3):
                dx_x[i, j] = (u_field.X[i](x + e) - u_field.X[i](x - e)) / (2 * step)
                dx_y[i, j] = (u_field.Y[i](x + e, y) - u_field.Y[i](x - e, y)) / (2 * step)
                grad_y[i, j] = (u_field.Y[i](x, y + e) - u_field.Y[i](x, y - e)) / (2 * step)
        m = left_invariant_frame(y)
        return FieldDerivatives(dx_x=dx_x, dx_y=dx_y, ey_y=grad_y @ m)

    return evaluate


def deformation_tensor(u_field: ProjectableField, alpha: AlphaCoefficients,
                       point: BundlePoint, evaluator) -> MixedTensor:
    """Rate of deformation: the covariant differential of the motion field.

    Blocks: hh[i, j] = p_j(X_i), vh[i, j] = p_j(Y_i), and the vertical
    block carries E_j(Y_i) plus the sum of Y_i-weighted frame
    differentials; the hv block vanishes.
    """
    d = evaluator(point)
    _, y_vals = u_field.evaluate(point)
    t = MixedTensor.zeros()
    t.data[:3, :3] = d.dx_x
    t.data[3:, :3] = d.dx_y
    t.data[3:, 3:] = d.ey_y
    for i in range(3):
        if y_vals[i] != 0.0:
            t.data[3:, 3:] += y_vals[i] * covariant_differential_frame(alpha, 3 + i).vv
    return t
