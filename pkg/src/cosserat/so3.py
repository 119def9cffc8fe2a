"""Rotation-group kernel.

Hat map between 3-vectors and skew matrices, the Rodrigues exponential,
the principal logarithm, a closed-form composition law in exponential
coordinates, and the left-invariant frame/coframe fields expressed in
canonical coordinates of the first kind.

Conventions
-----------
* Axis-angle vectors carry the rotation angle (radians) in their norm.
* Canonical coordinates live on the open chart ball ``|y| < pi - 1e-6``;
  there is deliberately no second chart.
* The left-invariant frame satisfies ``[E1, E2] = E3`` (cyclically); the
  coframe rows pair with the frame columns as the identity.
"""

from __future__ import annotations

import numpy as np

CHART_RADIUS = np.pi - 1e-6

# Taylor switchovers, chosen so truncation stays below 1e-12.
_EXP_SMALL = 1e-8
_FRAME_SMALL = 1e-4
_LOG_SMALL = 1e-6

# trace(R) at which the principal-branch logarithm hands off to axis
# extraction; trace <= -1 + 1e-6 corresponds to angles within ~1e-3 of pi.
_TRACE_NEAR_PI = -1.0 + 1e-6

# |cos(psi/2)| below which a composed rotation sits on the angle-pi cut.
_HALF_ANGLE_CUT = 5e-7


class GeometryError(ValueError):
    """Base class for rotation-chart domain errors."""


class AngleNearPi(GeometryError):
    """Logarithm requested within the flagged band around angle pi."""


class BranchCut(GeometryError):
    """Composition lands on the angle-pi branch cut of the logarithm."""


class ChartBoundary(GeometryError):
    """Canonical coordinates outside the open chart ball."""


def _vec3(v) -> np.ndarray:
    w = np.asarray(v, dtype=float)
    if w.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("vector components must be finite")
    return w


def hat(v) -> np.ndarray:
    """Skew matrix of a 3-vector, such that hat(v) @ u == cross(v, u)."""
    w = _vec3(v)
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def vee(a) -> np.ndarray:
    """Inverse of :func:`hat`.  Requires an exactly skew matrix."""
    m = np.asarray(a, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.array_equal(m, -m.T):
        raise ValueError("matrix is not exactly skew symmetric")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def rotation_defect(r) -> float:
    """max(|R Rt - I|_max, |det R - 1|); zero for a perfect rotation."""
    m = np.asarray(r, dtype=float)
    ortho = np.max(np.abs(m @ m.T - np.eye(3)))
    det = abs(float(np.linalg.det(m)) - 1.0)
    return max(float(ortho), det)


def assert_rotation(r, tol: float = 1e-12) -> np.ndarray:
    """Validate the rotation invariants; never repairs silently."""
    m = np.asarray(r, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    defect = rotation_defect(m)
    if defect > tol:
        raise ValueError(
            f"matrix violates rotation invariants (defect {defect:.3e} > {tol:.1e}); "
            "call orthonormalize() explicitly if a repair is intended"
        )
    return m


def orthonormalize(r) -> np.ndarray:
    """Nearest rotation in the Frobenius sense (polar factor via SVD)."""
    m = np.asarray(r, dtype=float)
    u, _, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def exp_rodrigues(w) -> np.ndarray:
    """Exponential of an axis-angle vector, in Rodrigues form.

    R = I + sin(phi) n^ + (1 - cos(phi)) n^^2 with phi = |w|, n = w/phi;
    below the small-angle switchover the quadratic Taylor form
    I + w^ + w^^2/2 is used instead.
    """
    v = _vec3(w)
    phi = float(np.linalg.norm(v))
    k = hat(v)
    if phi < _EXP_SMALL:
        return np.eye(3) + k + 0.5 * (k @ k)
    n = k / phi
    return np.eye(3) + np.sin(phi) * n + (1.0 - np.cos(phi)) * (n @ n)


def _log_axis_near_pi(r: np.ndarray) -> np.ndarray:
    # The trace is ill-conditioned for the angle here; the skew-part norm
    # sin(phi) recovers it with absolute error at roundoff level.
    skew_all = vee(r - r.T) / 2.0
    phi = np.pi - np.arcsin(min(float(np.linalg.norm(skew_all)), 1.0))
    # (R + I)/2 = ((1+c)/2) I + (s/2) n^ + ((1-c)/2) n nT; symmetrizing and
    # removing the identity part isolates n nT exactly.
    c = np.cos(phi)
    b = 0.5 * (r + np.eye(3))
    nnt = (0.5 * (b + b.T) - 0.5 * (1.0 + c) * np.eye(3)) / (0.5 * (1.0 - c))
    diag = np.clip(np.diag(nnt), 0.0, None)
    k = int(np.argmax(diag))
    n = nnt[:, k] / np.sqrt(diag[k])
    n = n / np.linalg.norm(n)
    skew = vee(r - r.T) / 2.0  # = sin(phi) n, may vanish at phi == pi
    if np.linalg.norm(skew) > 1e-12:
        if float(np.dot(n, skew)) < 0.0:
            n = -n
    else:
        nz = np.nonzero(np.abs(n) > 1e-8)[0]
        if nz.size and n[nz[0]] < 0.0:
            n = -n
    return phi * n


def log_rotation(r, near_pi_axis_fallback: bool = False) -> np.ndarray:
    """Principal logarithm of a rotation, as an axis-angle vector.

    Uses cos(phi) = (tr R - 1)/2 with prefactor phi / (2 sin(phi)); the
    returned angle lies in [0, pi).  Within the flagged band around angle
    pi (trace <= -1 + 1e-6) an :class:`AngleNearPi` error is raised unless
    ``near_pi_axis_fallback`` opts into eigen-axis extraction from
    (R + I)/2.
    """
    m = assert_rotation(r)
    tr = float(np.trace(m))
    cos_phi = np.clip(0.5 * (tr - 1.0), -1.0, 1.0)
    phi = float(np.arccos(cos_phi))
    if tr <= _TRACE_NEAR_PI:
        if not near_pi_axis_fallback:
            raise AngleNearPi(
                f"rotation angle {phi:.6f} is within the flagged band around pi; "
                "pass near_pi_axis_fallback=True to use axis extraction"
            )
        return _log_axis_near_pi(m)
    s = vee(m - m.T) / 2.0  # = sin(phi) * axis
    if phi < _LOG_SMALL:
        return s * (1.0 + phi * phi / 6.0 + 7.0 * phi ** 4 / 360.0)
    return s * (phi / np.sin(phi))


def bch_coefficients(x, y) -> tuple[float, float, float]:
    """Coefficients (alpha, beta, gamma) of the closed-form composition.

    log(exp(x^) exp(y^)) = alpha x + beta y + gamma (x cross y), built from
    the angles theta = |x|, phi = |y| and the axis cosine
    omega = (x . y)/(theta phi).  Raises :class:`BranchCut` when the
    composed rotation sits within 1e-6 of angle pi.
    """
    xv = _vec3(x)
    yv = _vec3(y)
    theta = float(np.linalg.norm(xv))
    phi = float(np.linalg.norm(yv))

    def _half_cot(t: float) -> float:
        if t < _FRAME_SMALL:
            return 1.0 - t * t / 12.0 - t ** 4 / 720.0
        return 0.5 * t / np.tan(0.5 * t)

    if theta < 1e-12 and phi < 1e-12:
        return (1.0, 1.0, 0.5)
    if phi < 1e-12:
        return (1.0, _half_cot(theta), 0.5)
    if theta < 1e-12:
        return (_half_cot(phi), 1.0, 0.5)

    w = float(np.clip(np.dot(xv, yv) / (theta * phi), -1.0, 1.0))
    st, ct = np.sin(theta), np.cos(0.5 * theta)
    sp, cp = np.sin(phi), np.cos(0.5 * phi)
    sht, shp = np.sin(0.5 * theta), np.sin(0.5 * phi)

    a = st * cp * cp - w * sp * sht * sht
    b = sp * ct * ct - w * st * shp * shp
    c = 0.5 * st * sp - 2.0 * w * sht * sht * shp * shp

    # Half-angle data of the composed rotation.
    big_a = sht * cp
    big_b = ct * shp
    big_c = sht * shp
    c_half = ct * cp - w * big_c
    s_half = np.sqrt(max(
        big_a * big_a + big_b * big_b + 2.0 * w * big_a * big_b
        + (1.0 - w * w) * big_c * big_c, 0.0))
    if abs(c_half) <= _HALF_ANGLE_CUT:
        raise BranchCut(
            "composed rotation angle is within 1e-6 of pi; "
            "composition is not defined on the principal branch"
        )
    psi = 2.0 * np.arctan2(s_half, c_half)
    if psi > np.pi:
        psi -= 2.0 * np.pi
    if abs(psi) < _LOG_SMALL:
        ratio = 1.0 + psi * psi / 6.0
    else:
        ratio = psi / np.sin(psi)
    return (ratio * a / theta, ratio * b / phi, ratio * c / (theta * phi))


def bch(x, y, return_coefficients: bool = False):
    """Axis-angle vector of exp(x^) exp(y^) via the closed composition law."""
    xv = _vec3(x)
    yv = _vec3(y)
    alpha, beta, gamma = bch_coefficients(xv, yv)
    z = alpha * xv + beta * yv + gamma * np.cross(xv, yv)
    if return_coefficients:
        return z, (alpha, beta, gamma)
    return z


def _frame_scalars(phi: float) -> tuple[float, float]:
    # a(phi) = (phi/2) cot(phi/2), b(phi) = (1 - a)/phi^2.
    if phi < _FRAME_SMALL:
        a = 1.0 - phi * phi / 12.0 - phi ** 4 / 720.0
        b = 1.0 / 12.0 + phi * phi / 720.0
    else:
        a = 0.5 * phi / np.tan(0.5 * phi)
        b = (1.0 - a) / (phi * phi)
    return a, b


def _check_chart(y: np.ndarray) -> float:
    phi = float(np.linalg.norm(y))
    if phi >= CHART_RADIUS:
        raise ChartBoundary(
            f"canonical coordinates with |y| = {phi:.6f} lie outside the "
            f"open chart ball of radius {CHART_RADIUS:.6f}"
        )
    return phi


def left_invariant_frame(y, rotational_sign: float = 1.0) -> np.ndarray:
    """Coefficient matrix M(y) of the left-invariant frame.

    Column j holds the coordinate components of E_j at the chart point y:

        E_j(y) = a(phi) e_j + (1/2) y x e_j + b(phi) y_j y,

    with a(phi) = (phi/2) cot(phi/2) and b(phi) = (1 - a(phi))/phi^2.
    M(0) = I, and the columns obey [E1, E2] = E3 cyclically.

    ``rotational_sign=-1`` flips the cross term; that variant reverses the
    bracket relations ([E1, E2] = -E3) and is kept only so tests can
    document the difference between the two sign conventions.
    """
    yv = _vec3(y)
    phi = _check_chart(yv)
    a, b = _frame_scalars(phi)
    return a * np.eye(3) + 0.5 * rotational_sign * hat(yv) + b * np.outer(yv, yv)


def coframe(y) -> np.ndarray:
    """Dual coframe at a chart point: row i holds the components of W_i.

    Rows are the coordinate coefficients of the invariant 1-forms dual to
    the frame columns, i.e. the matrix inverse of
    :func:`left_invariant_frame`.
    """
    m = left_invariant_frame(y)
    return np.linalg.inv(m)
