"""Batch time integration of the micropolar flow equations.

Second-order central differences on periodic boxes in the base directions,
the same stencils with one-sided closures on the fiber chart cube, and
classical RK4 in time.  Three regimes:

* ``RIGID_ROTOR``   -- no base motion, spatially uniform angular rates;
  the angular equations reduce exactly to the inertia-weighted rigid-body
  system.
* ``REDUCED_X``     -- all fields depend on the base point only, so every
  fiber derivative vanishes identically.
* ``FULL_BUNDLE``   -- angular rate, density and temperature fields live
  on the product (x-grid) x (fiber chart cube).

The mass update is discretized in flux form (equivalent to the advective
form at stencil order), which makes total mass over periodic base grids
exact up to roundoff.  The horizontal momentum equation in FULL_BUNDLE
mode takes the fiber average of its force density so the base velocity
stays projectable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .bundle import MediaConnectionForm
from .metric import ChristoffelMode, InertiaSpectrum, gyroscopic_coefficients
from .so3 import CHART_RADIUS, left_invariant_frame
from .thermo import PressureLaw, recover_temperature


class StateInvalid(RuntimeError):
    """A state field violates positivity or finiteness."""


class ScenarioMode(str, Enum):
    RIGID_ROTOR = "rigid_rotor"
    REDUCED_X = "reduced_x"
    FULL_BUNDLE = "full_bundle"


class EnergyMode(str, Enum):
    ISOTHERMAL = "iso"
    EVOLVED = "evolved"


class TraceTerm(str, Enum):
    CONTRACTION = "contraction"
    PAPER = "paper"


@dataclass(frozen=True)
class GridSpec:
    """Periodic base grid plus an optional fiber chart cube.

    Base axes with a single point are inactive (all derivatives vanish);
    active axes need at least four points.  The fiber cube spans
    [-ry, ry] per axis and must sit inside the chart ball, so
    sqrt(3) * ry < pi - 1e-6.
    """

    nx: tuple = (1, 1, 1)
    extent: tuple = (1.0, 1.0, 1.0)
    ny: tuple | None = None
    ry: float | None = None
    periodic: bool = True
    stencil_order: int = 2

    def __post_init__(self):
        if len(self.nx) != 3 or len(self.extent) != 3:
            raise ValueError("nx and extent must have three entries")
        for n in self.nx:
            if n != 1 and n < 4:
                raise ValueError("active base axes need at least 4 points")
        for e in self.extent:
            if not e > 0:
                raise ValueError("extent must be positive")
        if not self.periodic:
            raise ValueError("only periodic base boundaries are supported")
        if self.stencil_order != 2:
            raise ValueError("only second-order stencils are supported")
        if (self.ny is None) != (self.ry is None):
            raise ValueError("ny and ry must be given together")
        if self.ny is not None:
            if len(self.ny) != 3:
                raise ValueError("ny must have three entries")
            for n in self.ny:
                if n < 4:
                    raise ValueError("fiber axes need at least 4 points")
            if not 0 < self.ry:
                raise ValueError("ry must be positive")
            if np.sqrt(3.0) * self.ry >= CHART_RADIUS:
                raise ValueError(
                    f"fiber cube corner sqrt(3)*ry = {np.sqrt(3) * self.ry:.4f} "
                    f"reaches the chart ball of radius {CHART_RADIUS:.4f}")

    @property
    def x_shape(self) -> tuple:
        return tuple(self.nx)

    @property
    def y_shape(self) -> tuple:
        return tuple(self.ny) if self.ny is not None else ()

    @property
    def dx(self) -> np.ndarray:
        return np.array([e / n for e, n in zip(self.extent, self.nx)])

    @property
    def dy(self) -> np.ndarray:
        if self.ny is None:
            return np.array([])
        return np.array([2.0 * self.ry / (n - 1) for n in self.ny])

    def x_axes(self) -> list[np.ndarray]:
        return [np.arange(n) * (e / n) for n, e in zip(self.nx, self.extent)]

    def y_axes(self) -> list[np.ndarray]:
        if self.ny is None:
            return []
        return [np.linspace(-self.ry, self.ry, n) for n in self.ny]

    @property
    def cell_volume(self) -> float:
        vol = float(np.prod(self.dx))
        if self.ny is not None:
            vol *= float(np.prod(self.dy))
        return vol


@dataclass
class SimState:
    """Prognostic fields at one time level.

    X has shape (3,) + x_shape; Y, rho and T (or eps, in evolved-energy
    runs) share the field shape, which is x_shape or x_shape + y_shape.
    """

    t: float
    X: np.ndarray
    Y: np.ndarray
    rho: np.ndarray
    T: np.ndarray | None = None
    eps: np.ndarray | None = None

    def copy(self) -> "SimState":
        return SimState(
            t=self.t, X=self.X.copy(), Y=self.Y.copy(), rho=self.rho.copy(),
            T=None if self.T is None else self.T.copy(),
            eps=None if self.eps is None else self.eps.copy())

    def validate(self) -> None:
        for name, arr in (("X", self.X), ("Y", self.Y), ("rho", self.rho),
                          ("T", self.T), ("eps", self.eps)):
            if arr is None:
                continue
            if not np.all(np.isfinite(arr)):
                raise StateInvalid(f"non-finite values in field {name} at t={self.t:.6g}")
        if not np.all(self.rho > 0.0):
            raise StateInvalid(f"nonpositive density at t={self.t:.6g}")
        if self.T is not None and not np.all(self.T > 0.0):
            raise StateInvalid(f"nonpositive temperature at t={self.t:.6g}")


class Discretization:
    """Stencil machinery bound to a grid and scenario mode."""

    def __init__(self, grid: GridSpec, mode: ScenarioMode):
        self.grid = grid
        self.mode = ScenarioMode(mode)
        self.full = self.mode is ScenarioMode.FULL_BUNDLE
        if self.full and grid.ny is None:
            raise ValueError("full-bundle mode needs a fiber grid")
        if self.full:
            ys = grid.y_axes()
            yy = np.stack(np.meshgrid(*ys, indexing="ij"), axis=-1)  # (*ys, 3)
            flat = yy.reshape(-1, 3)
            frames = np.stack([left_invariant_frame(p) for p in flat])
            self.frames = frames.reshape(grid.y_shape + (3, 3))
        else:
            self.frames = None

    # -- base-direction derivatives (periodic central differences) ---------

    def ddx(self, f: np.ndarray, i: int) -> np.ndarray:
        if self.grid.nx[i] == 1:
            return np.zeros_like(f)
        h = self.grid.dx[i]
        return (np.roll(f, -1, axis=i) - np.roll(f, 1, axis=i)) / (2.0 * h)

    def d2dx2(self, f: np.ndarray, i: int) -> np.ndarray:
        if self.grid.nx[i] == 1:
            return np.zeros_like(f)
        h = self.grid.dx[i]
        return (np.roll(f, -1, axis=i) - 2.0 * f + np.roll(f, 1, axis=i)) / (h * h)

    # -- fiber-direction derivatives ---------------------------------------

    def ddy(self, f: np.ndarray, k: int) -> np.ndarray:
        if not self.full:
            return np.zeros_like(f)
        return np.gradient(f, self.grid.dy[k], axis=3 + k, edge_order=2)

    def frame_deriv(self, f: np.ndarray, j: int) -> np.ndarray:
        """E_j(f) = sum_k (df/dy_k) M[k, j] on the fiber grid."""
        if not self.full:
            return np.zeros_like(f)
        acc = np.zeros_like(f)
        for k in range(3):
            acc += self.ddy(f, k) * self.frames[..., k, j]
        return acc

    # -- shape plumbing ------------------------------------------------------

    def lift(self, xfield: np.ndarray) -> np.ndarray:
        """Broadcast a base-grid field over the fiber axes."""
        if not self.full:
            return xfield
        return xfield.reshape(xfield.shape + (1,) * len(self.grid.y_shape))

    def fiber_mean(self, f: np.ndarray) -> np.ndarray:
        if not self.full:
            return f
        return f.mean(axis=(3, 4, 5))


def temperature_of(state: SimState, disc: Discretization, law: PressureLaw) -> np.ndarray:
    """Resolve the temperature field, inverting the energy density if evolved."""
    if state.T is not None:
        return state.T
    if state.eps is None:
        raise StateInvalid("state carries neither T nor eps")
    div_x = sum(disc.ddx(disc.lift(state.X[i]), i) for i in range(3))
    div_v = sum(disc.frame_deriv(state.Y[i], i) for i in range(3))
    trf = div_x + div_v
    return np.asarray(recover_temperature(law, state.eps, state.rho, trf, div_v))


@dataclass
class Rhs:
    dX: np.ndarray
    dY: np.ndarray
    drho: np.ndarray
    deps: np.ndarray | None = None


def rhs_momentum(state: SimState, disc: Discretization, lam: InertiaSpectrum,
                 conn: MediaConnectionForm, law: PressureLaw,
                 chr_mode: ChristoffelMode = ChristoffelMode.KOSZUL,
                 temperature: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand sides of the velocity and angular-rate equations.

    dX_i/dt = - X_j p_j(X_i) + (p_i - w_ji E_j)(p2)/rho          (fiber-averaged
              when the force density depends on the fiber)
    dY_i/dt = - X_j p_j(Y_i) - Y_j E_j(Y_i) - G_i Y_j Y_k / rho
              + E_i(p1 + p2) / (lam_i rho)

    with G the mode-independent gyroscopic coefficients and (i, j, k)
    cyclic in the quadratic terms.
    """
    state.validate()
    t_field = temperature_of(state, disc, law) if temperature is None else temperature
    rho = state.rho
    p2 = law.p(2, t_field, rho)
    p12 = law.p(1, t_field, rho) + p2
    lam_arr = lam.as_array()
    gyro = gyroscopic_coefficients(lam, chr_mode)

    e_p2 = [disc.frame_deriv(p2, j) for j in range(3)] if disc.full else None
    e_p12 = [disc.frame_deriv(p12, i) for i in range(3)] if disc.full else None

    dX = np.zeros_like(state.X)
    for i in range(3):
        adv = np.zeros_like(state.X[i])
        for j in range(3):
            adv += state.X[j] * disc.ddx(state.X[i], j)
        if disc.full:
            force = disc.ddx(p2, i)
            for j in range(3):
                force -= conn.omega[j, i] * e_p2[j]
            dX[i] = -adv + disc.fiber_mean(force / rho)
        else:
            force = disc.ddx(p2, i)
            dX[i] = -adv + force / rho

    pair = ((1, 2), (2, 0), (0, 1))
    dY = np.zeros_like(state.Y)
    for i in range(3):
        adv = np.zeros_like(state.Y[i])
        for j in range(3):
            adv += disc.lift(state.X[j]) * disc.ddx(state.Y[i], j)
        if disc.full:
            for j in range(3):
                adv += state.Y[j] * disc.frame_deriv(state.Y[i], j)
        j, k = pair[i]
        dY[i] = -adv - gyro[i] * state.Y[j] * state.Y[k] / rho
        if disc.full:
            dY[i] += e_p12[i] / (lam_arr[i] * rho)
    return dX, dY


def rhs_mass(state: SimState, disc: Discretization) -> np.ndarray:
    """Density update in flux form: -sum_i p_i(rho X_i) - sum_i E_i(rho Y_i).

    Pointwise equal to the advective form at stencil order; on periodic
    base grids the flux sums telescope, so total mass is conserved to
    roundoff per evaluation.
    """
    state.validate()
    drho = np.zeros_like(state.rho)
    for i in range(3):
        drho -= disc.ddx(state.rho * disc.lift(state.X[i]), i)
    if disc.full:
        for i in range(3):
            drho -= disc.frame_deriv(state.rho * state.Y[i], i)
    return drho


def rhs_mass_advective(state: SimState, disc: Discretization) -> np.ndarray:
    """Advective-form density update, kept for the equivalence check."""
    drho = np.zeros_like(state.rho)
    for i in range(3):
        drho -= disc.lift(state.X[i]) * disc.ddx(state.rho, i)
        drho -= state.rho * disc.ddx(disc.lift(state.X[i]), i)
    if disc.full:
        for i in range(3):
            drho -= state.Y[i] * disc.frame_deriv(state.rho, i)
            drho -= state.rho * disc.frame_deriv(state.Y[i], i)
    return drho


def rhs_energy(state: SimState, disc: Discretization, lam: InertiaSpectrum,
               conn: MediaConnectionForm, law: PressureLaw, zeta: float,
               trace_term: TraceTerm = TraceTerm.CONTRACTION,
               temperature: np.ndarray | None = None) -> np.ndarray:
    """Energy-density update.

    d eps/dt = -(div U) eps - P + div(zeta grad T), with the conduction
    term discretized in the orthogonal bundle frame
    sum_i p_i(zeta p_i T) + sum_i lam_i^{-1} E_i(zeta E_i T), and the
    production term P either the stress contraction with the deformation
    (default) or the plain sum of the fiber divergences of the angular
    rate (compatibility flag).
    """
    state.validate()
    if state.eps is None:
        raise StateInvalid("energy update requested without an energy field")
    t_field = temperature_of(state, disc, law) if temperature is None else temperature
    div_x = sum(disc.ddx(disc.lift(state.X[i]), i) for i in range(3))
    div_v = sum(disc.frame_deriv(state.Y[i], i) for i in range(3))
    div_u = div_x + div_v
    if TraceTerm(trace_term) is TraceTerm.CONTRACTION:
        production = law.p(1, t_field, state.rho) * div_u \
            + law.p(2, t_field, state.rho) * div_v
    else:
        production = div_v
    conduction = np.zeros_like(state.eps)
    for i in range(3):
        conduction += zeta * disc.d2dx2(t_field, i)
    if disc.full:
        lam_arr = lam.as_array()
        for i in range(3):
            conduction += disc.frame_deriv(zeta * disc.frame_deriv(t_field, i), i) / lam_arr[i]
    return -div_u * state.eps - production + conduction


@dataclass(frozen=True)
class Model:
    """Everything needed to assemble the full right-hand side."""

    grid: GridSpec
    mode: ScenarioMode
    energy: EnergyMode
    lam: InertiaSpectrum
    conn: MediaConnectionForm
    law: PressureLaw
    zeta: float = 0.0
    chr_mode: ChristoffelMode = ChristoffelMode.KOSZUL
    trace_term: TraceTerm = TraceTerm.CONTRACTION

    def discretization(self) -> Discretization:
        return Discretization(self.grid, self.mode)


def assemble_rhs(state: SimState, disc: Discretization, model: Model) -> Rhs:
    t_field = temperature_of(state, disc, model.law)
    dX, dY = rhs_momentum(state, disc, model.lam, model.conn, model.law,
                          model.chr_mode, temperature=t_field)
    drho = rhs_mass(state, disc)
    deps = None
    if EnergyMode(model.energy) is EnergyMode.EVOLVED:
        deps = rhs_energy(state, disc, model.lam, model.conn, model.law,
                          model.zeta, model.trace_term, temperature=t_field)
    return Rhs(dX=dX, dY=dY, drho=drho, deps=deps)


def _advance(state: SimState, coeff: float, rhs: Rhs) -> SimState:
    out = SimState(
        t=state.t,
        X=state.X + coeff * rhs.dX,
        Y=state.Y + coeff * rhs.dY,
        rho=state.rho + coeff * rhs.drho,
        T=None if state.T is None else state.T,
        eps=None if state.eps is None else state.eps + coeff * rhs.deps)
    return out


def step_rk4(state: SimState, dt: float, disc: Discretization, model: Model) -> SimState:
    """One classical four-stage explicit step; validates the result."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    k1 = assemble_rhs(state, disc, model)
    k2 = assemble_rhs(_advance(state, 0.5 * dt, k1), disc, model)
    k3 = assemble_rhs(_advance(state, 0.5 * dt, k2), disc, model)
    k4 = assemble_rhs(_advance(state, dt, k3), disc, model)

    def combine(a, b, c, d):
        return (a + 2.0 * b + 2.0 * c + d) * (dt / 6.0)

    new = SimState(
        t=state.t + dt,
        X=state.X + combine(k1.dX, k2.dX, k3.dX, k4.dX),
        Y=state.Y + combine(k1.dY, k2.dY, k3.dY, k4.dY),
        rho=state.rho + combine(k1.drho, k2.drho, k3.drho, k4.drho),
        T=None if state.T is None else state.T.copy(),
        eps=None if state.eps is None else
            state.eps + combine(k1.deps, k2.deps, k3.deps, k4.deps))
    new.validate()
    return new


def cfl_number(state: SimState, disc: Discretization, dt: float) -> float:
    """Advisory advective CFL estimate across base and fiber directions."""
    cfl = 0.0
    for i in range(3):
        if disc.grid.nx[i] > 1:
            cfl += float(np.max(np.abs(state.X[i]))) * dt / disc.grid.dx[i]
    if disc.full:
        speed = np.zeros(state.Y.shape[1:])
        for k in range(3):
            comp = np.zeros_like(speed)
            for j in range(3):
                comp += disc.frames[..., k, j] * state.Y[j]
            speed = np.maximum(speed, np.abs(comp))
        cfl += float(np.max(speed)) * dt / float(np.min(disc.grid.dy))
    return cfl


def diagnostics(state: SimState, disc: Discretization, model: Model,
                dt: float | None = None) -> dict:
    """Conservation and sanity functionals of a state."""
    grid = disc.grid
    lam_arr = model.lam.as_array()
    mean_sq = np.array([float(np.mean(state.Y[i] ** 2)) for i in range(3)])
    div_x = sum(disc.ddx(disc.lift(state.X[i]), i) for i in range(3))
    div_v = sum(disc.frame_deriv(state.Y[i], i) for i in range(3))
    t_field = temperature_of(state, disc, model.law)
    # Gibbs-identity tripwire: eps - (h + T s) at the field means
    trf = float(np.mean(div_x + div_v))
    trv = float(np.mean(div_v))
    tbar = float(np.mean(t_field))
    rbar = float(np.mean(state.rho))
    law = model.law
    h = law.p(1, tbar, rbar) * trf + law.p(2, tbar, rbar) * trv
    s = -(law.p_t(1, tbar, rbar) * trf + law.p_t(2, tbar, rbar) * trv)
    eps_chk = law.p_minus_t_pt(1, tbar, rbar) * trf + law.p_minus_t_pt(2, tbar, rbar) * trv
    gibbs_residual = abs(eps_chk - (h + tbar * s))
    # mode-independence probe on the momentum right-hand side
    dxp, dyp = rhs_momentum(state, disc, model.lam, model.conn, model.law,
                            ChristoffelMode.PAPER, temperature=t_field)
    dxk, dyk = rhs_momentum(state, disc, model.lam, model.conn, model.law,
                            ChristoffelMode.KOSZUL, temperature=t_field)
    mode_diff = max(float(np.max(np.abs(dxp - dxk))), float(np.max(np.abs(dyp - dyk))))
    return {
        "t": state.t,
        "total_mass": float(np.sum(state.rho)) * grid.cell_volume,
        "rotor_energy": 0.5 * float(np.sum(lam_arr * mean_sq)),
        "casimir": float(np.sum(lam_arr ** 2 * mean_sq)),
        "rho_min": float(np.min(state.rho)),
        "rho_max": float(np.max(state.rho)),
        "div_x_inf": float(np.max(np.abs(div_x))),
        "div_v_inf": float(np.max(np.abs(div_v))),
        "cfl": cfl_number(state, disc, dt) if dt else 0.0,
        "gibbs_residual": gibbs_residual,
        "mode_rhs_diff": mode_diff,
    }


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------

def _field_shape(grid: GridSpec, mode: ScenarioMode) -> tuple:
    if ScenarioMode(mode) is ScenarioMode.FULL_BUNDLE:
        return grid.x_shape + grid.y_shape
    return grid.x_shape


def initial_uniform(grid: GridSpec, mode: ScenarioMode, y0=(0.0, 0.0, 0.0),
                    rho0: float = 1.0, t0: float = 1.0) -> SimState:
    """Spatially uniform state (the rigid-rotor configuration)."""
    shape = _field_shape(grid, mode)
    y = np.zeros((3,) + shape)
    for i in range(3):
        y[i] = y0[i]
    return SimState(t=0.0, X=np.zeros((3,) + grid.x_shape), Y=y,
                    rho=np.full(shape, rho0), T=np.full(shape, t0))


def initial_classical_1d(grid: GridSpec, mode: ScenarioMode, u_base: float = 0.2,
                         u_amp: float = 0.1, rho_amp: float = 0.2,
                         rho0: float = 1.0, t0: float = 1.0) -> SimState:
    """Smooth 1D velocity/density waves along x1 with zero angular rate."""
    shape = _field_shape(grid, mode)
    x1 = grid.x_axes()[0].reshape((-1,) + (1,) * (len(shape) - 1))
    k = 2.0 * np.pi / grid.extent[0]
    x_field = np.zeros((3,) + grid.x_shape)
    x_field[0] = (u_base + u_amp * np.sin(k * x1)).reshape(grid.x_shape)
    rho = np.broadcast_to(rho0 + rho_amp * np.sin(k * x1), shape).copy()
    return SimState(t=0.0, X=x_field, Y=np.zeros((3,) + shape),
                    rho=rho, T=np.full(shape, t0))


def initial_reduced_coupled(grid: GridSpec, mode: ScenarioMode, y0=(0.3, 0.8, 0.2),
                            y_amp: float = 0.05, u_amp: float = 0.1,
                            rho_amp: float = 0.1, rho0: float = 1.0,
                            t0: float = 1.0) -> SimState:
    """x-dependent angular rates riding on a smooth compressible wave."""
    state = initial_classical_1d(grid, mode, u_base=0.0, u_amp=u_amp,
                                 rho_amp=rho_amp, rho0=rho0, t0=t0)
    shape = state.rho.shape
    x1 = grid.x_axes()[0].reshape((-1,) + (1,) * (len(shape) - 1))
    k = 2.0 * np.pi / grid.extent[0]
    for i in range(3):
        state.Y[i] = y0[i] + y_amp * np.sin(k * x1 + 0.7 * i)
    return state


def initial_full_bundle(grid: GridSpec, mode: ScenarioMode, y0=(0.05, 0.02, 0.01),
                        rho_amp: float = 0.05, rho0: float = 1.0,
                        t0: float = 1.0) -> SimState:
    """Uniform angular rate with a fiber-dependent density perturbation."""
    if ScenarioMode(mode) is not ScenarioMode.FULL_BUNDLE:
        raise ValueError("full-bundle initial data needs full-bundle mode")
    state = initial_uniform(grid, mode, y0=y0, rho0=rho0, t0=t0)
    x1 = grid.x_axes()[0]
    y_axes = grid.y_axes()
    kx = 2.0 * np.pi / grid.extent[0]
    xs = np.sin(kx * x1).reshape((-1, 1, 1, 1, 1, 1))
    yy = np.stack(np.meshgrid(*y_axes, indexing="ij"), axis=-1)
    bump = np.cos(0.5 * np.pi * yy[..., 0] / grid.ry) \
        * np.cos(0.25 * np.pi * yy[..., 1] / grid.ry)
    state.rho = rho0 + rho_amp * xs * bump.reshape((1, 1, 1) + grid.y_shape)
    state.rho = np.ascontiguousarray(np.broadcast_to(state.rho,
                                                     grid.x_shape + grid.y_shape))
    return state


INITIAL_CONDITIONS = {
    "uniform": initial_uniform,
    "classical_1d": initial_classical_1d,
    "reduced_coupled": initial_reduced_coupled,
    "full_bundle": initial_full_bundle,
}


@dataclass
class RunResult:
    diagnostics: list
    snapshots: list
    summary: dict


def run(model: Model, initial: SimState, dt: float, t_end: float,
        cadence: int = 10, keep_snapshots: bool = True) -> RunResult:
    """Integrate to t_end, emitting diagnostics and snapshots per cadence.

    Any step failure aborts with a structured error block in the summary;
    the exception is re-raised by the caller-facing CLI, not here.
    """
    disc = model.discretization()
    initial.validate()
    n_steps = int(round(t_end / dt))
    state = initial.copy()
    diags = [dict(diagnostics(state, disc, model, dt), step=0)]
    snaps = [(0, state.copy())] if keep_snapshots else []
    wall0 = time.perf_counter()
    error = None
    step = 0
    try:
        for step in range(1, n_steps + 1):
            state = step_rk4(state, dt, disc, model)
            if step % cadence == 0 or step == n_steps:
                diags.append(dict(diagnostics(state, disc, model, dt), step=step))
                if keep_snapshots:
                    snaps.append((step, state.copy()))
    except Exception as exc:  # noqa: BLE001 - abort with a structured report
        error = {"step": step, "type": type(exc).__name__, "message": str(exc)}
    wall = time.perf_counter() - wall0
    summary = {
        "steps_completed": step if error is None else step - 1,
        "steps_requested": n_steps,
        "t_final": state.t,
        "wall_time_s": wall,
        "final_diagnostics": diags[-1],
        "error": error,
        "status": "ok" if error is None else "aborted",
    }
    return RunResult(diagnostics=diags, snapshots=snaps, summary=summary)
