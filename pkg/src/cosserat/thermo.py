"""Thermodynamics of the medium.

Pressure laws, the deformation free energy and its state maps (entropy,
stress, chemical potential), energy density, temperature recovery, the
divergence of the stress, and a first-law residual check.

Conventions that the residual check enforces exactly:

* free energy  h(T, rho, D) = p1(T, rho) tr(D) + p2(T, rho) tr_V(D),
  with tr the full six-term trace and tr_V the vertical-block trace;
* entropy density  s = -dh/dT  (the sign that annihilates the first-law
  form ds - (dE - <sigma, dD> - xi drho)/T along state paths);
* stress  sigma = dh/dD, taken entrywise against the full 6x6 contraction
  <sigma, D> = sum_ab sigma_ab D_ab, which makes <sigma, D> = h exactly
  (the free energy is homogeneous of degree one in the deformation);
* chemical potential  xi = dh/drho;
* energy density  eps = h - T dh/dT = h + T s.

The scalar pressure dual to volume is not an independent state function
here; the Gibbs identity defines it, p = <sigma, D> + xi rho - h, which
collapses to p = xi rho.  It is reported as a diagnostic only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import BundlePoint, MediaConnectionForm
from .metric import InertiaSpectrum
from .so3 import left_invariant_frame
from .tensors import MixedTensor


class DomainError(ValueError):
    """Nonpositive temperature or density."""


class TemperatureRecoveryFailed(RuntimeError):
    """Energy density cannot be inverted for the temperature."""


@dataclass(frozen=True)
class PressureLaw:
    """Two-coefficient-set pressure family p_k = a_k rho + b_k rho T + c_k rho T ln T.

    The T ln T term keeps the energy density from vanishing identically
    (for laws linear in T, p - T p_T = 0), so c-coefficients must be
    nonzero whenever the energy equation is evolved.
    """

    a1: float = 1.0
    b1: float = 0.1
    c1: float = 0.3
    a2: float = 0.5
    b2: float = 0.1
    c2: float = 0.2

    def _coeffs(self, k: int) -> tuple[float, float, float]:
        if k == 1:
            return (self.a1, self.b1, self.c1)
        if k == 2:
            return (self.a2, self.b2, self.c2)
        raise ValueError("pressure index must be 1 or 2")

    def p(self, k: int, t, rho):
        a, b, c = self._coeffs(k)
        return a * rho + b * rho * t + c * rho * t * np.log(t)

    def p_t(self, k: int, t, rho):
        a, b, c = self._coeffs(k)
        return b * rho + c * rho * (np.log(t) + 1.0)

    def p_rho(self, k: int, t, rho):
        a, b, c = self._coeffs(k)
        return a + b * t + c * t * np.log(t)

    def p_minus_t_pt(self, k: int, t, rho):
        """p_k - T p_{k,T}; for this family exactly a_k rho - c_k rho T."""
        a, _, c = self._coeffs(k)
        return a * rho - c * rho * t


def _check_state(t, rho) -> None:
    if not np.all(np.asarray(t) > 0.0):
        raise DomainError("temperature must be positive")
    if not np.all(np.asarray(rho) > 0.0):
        raise DomainError("density must be positive")


def gibbs_energy(law: PressureLaw, t: float, rho: float, delta: MixedTensor) -> float:
    """Deformation free energy h = p1 tr(D) + p2 tr_V(D)."""
    _check_state(t, rho)
    return float(law.p(1, t, rho) * delta.trace_full()
                 + law.p(2, t, rho) * delta.trace_vertical())


def stress_tensor(law: PressureLaw, t: float, rho: float) -> MixedTensor:
    """Stress sigma = dh/dD: p1 on the full diagonal plus p2 on the vertical.

    Equivalently the pairing representative of the operator
    p1 * Id + p2 * (vertical diagonal); it has no off-diagonal entries,
    matching the fact that h sees the deformation only through its two
    diagonal traces.
    """
    p1 = float(law.p(1, t, rho))
    p2 = float(law.p(2, t, rho))
    return MixedTensor.from_blocks(hh=p1 * np.eye(3), vv=(p1 + p2) * np.eye(3))


def state_equations(law: PressureLaw, t: float, rho: float,
                    delta: MixedTensor) -> tuple[float, MixedTensor, float]:
    """Entropy density, stress tensor and chemical potential at a state.

    s = -dh/dT and xi = dh/drho with analytic partials; sigma = dh/dD.
    """
    _check_state(t, rho)
    trf = delta.trace_full()
    trv = delta.trace_vertical()
    s = -float(law.p_t(1, t, rho) * trf + law.p_t(2, t, rho) * trv)
    xi = float(law.p_rho(1, t, rho) * trf + law.p_rho(2, t, rho) * trv)
    return s, stress_tensor(law, t, rho), xi


def energy_density(law: PressureLaw, t: float, rho: float, delta: MixedTensor) -> float:
    """eps = (p1 - T p1_T) tr(D) + (p2 - T p2_T) tr_V(D) = h + T s."""
    _check_state(t, rho)
    return float(law.p_minus_t_pt(1, t, rho) * delta.trace_full()
                 + law.p_minus_t_pt(2, t, rho) * delta.trace_vertical())


def mechanical_pressure(law: PressureLaw, t: float, rho: float,
                        delta: MixedTensor) -> float:
    """Diagnostic pressure defined through the Gibbs identity.

    p = <sigma, D> + xi rho - (eps - T s); with the shipped state maps the
    contraction equals h, so p = xi rho.
    """
    s, sigma, xi = state_equations(law, t, rho, delta)
    eps = energy_density(law, t, rho, delta)
    return float(sigma.contract(delta) + xi * rho - (eps - t * s))


def first_law_residual(law: PressureLaw, path, samples: int = 101,
                       step: float = 1e-4, state_fn=None) -> float:
    """Max finite-difference residual of the first-law form along a path.

    ``path(t)`` maps [0, 1] to (T, rho, D).  At interior samples the
    residual  ds/dt - (d eps/dt - <sigma, dD/dt> - xi d rho/dt)/T  is
    formed with central differences; for states generated by
    :func:`state_equations` it vanishes to O(step^2).  ``state_fn`` may
    replace the state map (used by corrupted-stress negative controls);
    it must return (s, sigma, xi) for (T, rho, D).
    """
    if samples < 100:
        raise ValueError("need at least 100 samples along the path")
    if state_fn is None:
        state_fn = lambda t, rho, d: state_equations(law, t, rho, d)

    def observables(tau: float):
        t, rho, d = path(tau)
        s, sigma, xi = state_fn(t, rho, d)
        eps = energy_density(law, t, rho, d)
        return t, rho, d, s, sigma, xi, eps

    worst = 0.0
    taus = np.linspace(step, 1.0 - step, samples)
    for tau in taus:
        t0, rho0, d0, s0, sigma0, xi0, _ = observables(tau)
        tp, rhop, dp, sp, _, _, epsp = observables(tau + step)
        tm, rhom, dm, sm, _, _, epsm = observables(tau - step)
        ds = (sp - sm) / (2 * step)
        deps = (epsp - epsm) / (2 * step)
        drho = (rhop - rhom) / (2 * step)
        ddelta = MixedTensor((dp.data - dm.data) / (2 * step))
        resid = ds - (deps - sigma0.contract(ddelta) - xi0 * drho) / t0
        worst = max(worst, abs(float(resid)))
    return worst


def recover_temperature(law: PressureLaw, eps, rho, tr_full, tr_vertical,
                        tol: float = 1e-12, max_iter: int = 60):
    """Invert the energy density for T at fixed rho and deformation traces.

    eps(T) = (a1 rho - c1 rho T) trf + (a2 rho - c2 rho T) trv is strictly
    monotone in T only when c1 trf + c2 trv != 0; a vanishing slope (or a
    nonpositive solution) raises :class:`TemperatureRecoveryFailed` --
    never a silent clamp.  Vectorized over numpy arrays; bracketed Newton
    with bisection safeguarding, tolerance on |eps(T) - eps|.
    """
    eps = np.asarray(eps, dtype=float)
    rho = np.asarray(rho, dtype=float)
    trf = np.asarray(tr_full, dtype=float)
    trv = np.asarray(tr_vertical, dtype=float)
    if not np.all(rho > 0.0):
        raise DomainError("density must be positive")
    slope = -(law.c1 * trf + law.c2 * trv) * rho
    if np.any(np.abs(slope) < 1e-14):
        raise TemperatureRecoveryFailed(
            "energy density is not strictly monotone in T here "
            "(c1*tr + c2*tr_V vanishes); temperature cannot be recovered")

    def f(t):
        return (law.a1 * rho - law.c1 * rho * t) * trf \
            + (law.a2 * rho - law.c2 * rho * t) * trv - eps

    # bracket a positive root
    lo = np.full_like(eps, 1e-12)
    hi = np.full_like(eps, 1.0)
    for _ in range(200):
        bad = np.sign(f(lo)) == np.sign(f(hi))
        if not np.any(bad):
            break
        hi = np.where(bad, hi * 2.0, hi)
        if np.any(hi > 1e12):
            raise TemperatureRecoveryFailed("no positive temperature brackets the energy")
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        ft = f(t)
        if np.all(np.abs(ft) <= tol * (1.0 + np.abs(eps))):
            break
        t_new = t - ft / slope
        outside = (t_new <= lo) | (t_new >= hi)
        t_new = np.where(outside, 0.5 * (lo + hi), t_new)
        move_lo = np.sign(f(t_new)) == np.sign(f(lo))
        lo = np.where(move_lo, t_new, lo)
        hi = np.where(move_lo, hi, t_new)
        t = t_new
    else:
        raise TemperatureRecoveryFailed("temperature iteration did not converge")
    if not np.all(t > 0.0):
        raise TemperatureRecoveryFailed("recovered temperature is not positive")
    return t if t.shape else float(t)


# ---------------------------------------------------------------------------
# stress divergence on the bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarDerivatives:
    """Coordinate and fiber-frame derivatives of a scalar field at a point."""

    grad_x: np.ndarray  # (3,) p_i(f)
    grad_e: np.ndarray  # (3,) E_i(f)


def scalar_finite_differences(fn, step: float = 1e-6):
    """Central-difference backend for f(x, y) scalar fields."""

    def evaluate(point: BundlePoint) -> ScalarDerivatives:
        x, y = point.x, point.y
        gx = np.zeros(3)
        gy = np.zeros(3)
        for j in range(3):
            e = np.zeros(3)
            e[j] = step
            gx[j] = (fn(x + e, y) - fn(x - e, y)) / (2 * step)
            gy[j] = (fn(x, y + e) - fn(x, y - e)) / (2 * step)
        return ScalarDerivatives(grad_x=gx, grad_e=gy @ left_invariant_frame(y))

    return evaluate


def _pressure_gradients(law: PressureLaw, t_field, rho_field, point: BundlePoint,
                        derivative_backend):
    """Chain-rule gradients of p2 and p1+p2 through the field derivatives."""
    t0 = float(t_field(point.x, point.y))
    rho0 = float(rho_field(point.x, point.y))
    _check_state(t0, rho0)
    dt = derivative_backend(t_field)(point)
    drho = derivative_backend(rho_field)(point)

    def grads(k):
        pt = float(law.p_t(k, t0, rho0))
        pr = float(law.p_rho(k, t0, rho0))
        return (pt * dt.grad_x + pr * drho.grad_x,
                pt * dt.grad_e + pr * drho.grad_e)

    g1x, g1e = grads(1)
    g2x, g2e = grads(2)
    return (g2x, g2e, g1x + g2x, g1e + g2e)


def div_stress(law: PressureLaw, conn: MediaConnectionForm, t_field, rho_field,
               point: BundlePoint, derivative_backend=None) -> np.ndarray:
    """Divergence of the flow stress, as a coform in the (d, W) basis.

    div sigma = sum_i [ E_i(p1 + p2) W_i + (p_i - sum_j w_ji E_j)(p2) d_i ];
    the d_i coefficient is the horizontal-lift derivative h_i(p2).  When
    the fields do not depend on the fiber the W components vanish.
    """
    if derivative_backend is None:
        derivative_backend = scalar_finite_differences
    g2x, g2e, _, g12e = _pressure_gradients(law, t_field, rho_field, point,
                                            derivative_backend)
    out = np.zeros(6)
    out[:3] = g2x - conn.omega.T @ g2e   # h_i(p2) = p_i(p2) - sum_j w_ji E_j(p2)
    out[3:] = g12e
    return out


def div_flat_stress(lam: InertiaSpectrum, law: PressureLaw, conn: MediaConnectionForm,
                    t_field, rho_field, point: BundlePoint,
                    derivative_backend=None) -> np.ndarray:
    """Metric dual of :func:`div_stress`, as a 6-vector in the (p, E) basis.

    The exact bundle-metric raise: d_i lifts to h_i and the vertical
    components divide by lam_i, so expressed over (h, E) the horizontal
    coefficients are the h_i-pairings of the coform.  For a flat
    connection this reduces to leaving the d-components on p_i unchanged.
    The defining property g_mu(div_flat, V) = (div sigma)(V) holds for
    every 6-vector V.
    """
    alpha = div_stress(law, conn, t_field, rho_field, point, derivative_backend)
    a, b = alpha[:3], alpha[3:]
    a_h = a - conn.omega.T @ b          # alpha(h_i)
    out = np.zeros(6)
    out[:3] = a_h
    out[3:] = b / lam.as_array() - conn.omega @ a_h
    return out
