"""Left-invariant fiber metrics and their connection data.

The fiber metric is diagonal in the invariant frame, g(E_i, E_i) = lam_i
(moments of inertia of the microelement).  Two Christoffel tables are
shipped:

* ``PAPER`` -- the closed-form table
      G_12^3 = (lam - lam_1)/lam_3 (cyclically), G_21^3 = G_12^3 - 1, ...
  It is torsion-free but violates metric compatibility with residual
  exactly lam = lam_1 + lam_2 + lam_3 (kept as documentation of the
  source formula it reproduces downstream).
* ``KOSZUL`` -- the self-consistent Levi-Civita solution
      G_ij^k = eps_ijk (lam_j + lam_k - lam_i) / (2 lam_k),
  which satisfies metric compatibility and torsion-freeness exactly
  (in rational arithmetic when the lam_i are Fractions).

Only the symmetric, dynamics-entering combination of the connection
coefficients feeds the flow equations; :func:`gyroscopic_coefficients`
yields identical values for both modes, which is why the assembled
momentum equations do not depend on the table choice.  The raw tables'
symmetric parts differ by exactly lam/lam_k on the permutation entries;
see :func:`symmetric_part`.

All table arithmetic happens in native Python scalars so that Fractions
stay exact end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tensors import MixedTensor

_EVEN = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
_ODD = ((1, 0, 2), (2, 1, 0), (0, 2, 1))
PERMUTATIONS = tuple((p, 1) for p in _EVEN) + tuple((p, -1) for p in _ODD)


def levi_civita(i: int, j: int, k: int) -> int:
    if (i, j, k) in _EVEN:
        return 1
    if (i, j, k) in _ODD:
        return -1
    return 0


@dataclass(frozen=True)
class InertiaSpectrum:
    """Eigenvalues of the inertia operator; Fractions are welcome."""

    lam1: float
    lam2: float
    lam3: float

    def __post_init__(self):
        for name, value in zip(("lambda1", "lambda2", "lambda3"), self.as_tuple()):
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    def as_tuple(self):
        return (self.lam1, self.lam2, self.lam3)

    @property
    def total(self):
        """lam = lam1 + lam2 + lam3, always derived."""
        return self.lam1 + self.lam2 + self.lam3

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.as_tuple()])


class ChristoffelMode(str, Enum):
    PAPER = "paper"
    KOSZUL = "koszul"


@dataclass(frozen=True)
class ChristoffelTable:
    """Connection coefficients G[i][j][k] of nabla_{E_i} E_j along E_k."""

    mode: ChristoffelMode
    entries: tuple

    def gamma(self, i: int, j: int, k: int):
        return self.entries[i][j][k]

    def as_array(self) -> np.ndarray:
        return np.array(
            [[[float(self.entries[i][j][k]) for k in range(3)]
              for j in range(3)] for i in range(3)])


def christoffel(lam: InertiaSpectrum, mode: ChristoffelMode = ChristoffelMode.KOSZUL) -> ChristoffelTable:
    """Build the connection table for the given mode."""
    mode = ChristoffelMode(mode)
    l = lam.as_tuple()
    total = lam.total
    g = [[[0 * total for _ in range(3)] for _ in range(3)] for _ in range(3)]
    if mode is ChristoffelMode.PAPER:
        for i, j, k in _EVEN:
            g[i][j][k] = (total - l[i]) / l[k]
            g[j][i][k] = g[i][j][k] - 1
    else:
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    eps = levi_civita(i, j, k)
                    if eps:
                        g[i][j][k] = eps * (l[j] + l[k] - l[i]) / (2 * l[k])
    frozen = tuple(tuple(tuple(row) for row in plane) for plane in g)
    return ChristoffelTable(mode=mode, entries=frozen)


def metric_vertical(lam: InertiaSpectrum, u, v) -> float:
    """Fiber metric on E-frame components: sum_i lam_i u_i v_i."""
    uu = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    return float(np.sum(lam.as_array() * uu * vv))


def covariant_derivative_vertical(table: ChristoffelTable, i: int, j: int) -> np.ndarray:
    """E-frame components of nabla_{E_i} E_j (indices 0-based)."""
    return np.array([float(table.gamma(i, j, k)) for k in range(3)])


def christ1_residual(table: ChristoffelTable, lam: InertiaSpectrum):
    """Metric-compatibility residuals lam_k G_ij^k + lam_j G_ik^j.

    Zero for a metric connection; the PAPER table yields exactly
    lam on the six permutation triples.
    """
    l = lam.as_tuple()
    out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            for k in range(3):
                out[i][j][k] = l[k] * table.gamma(i, j, k) + l[j] * table.gamma(i, k, j)
    return out


def christ2_residual(table: ChristoffelTable):
    """Torsion residuals G_s1s2^k - G_s2s1^k - sign(s) delta_{k,s3}.

    The orientation-aware reading of the torsion-free condition: for odd
    permutations the commutator [E_s1, E_s2] = sign(s) E_s3 carries the
    sign.  Zero for both shipped tables.
    """
    out = []
    for (s1, s2, s3), sgn in PERMUTATIONS:
        for k in range(3):
            target = sgn if k == s3 else 0
            out.append(table.gamma(s1, s2, k) - table.gamma(s2, s1, k) - target)
    return out


def symmetric_part(table: ChristoffelTable) -> np.ndarray:
    """sym[i, j, k] = G_ij^k + G_ji^k.

    Between the two modes these raw symmetrizations differ by exactly
    lam/lam_k on the permutation entries; the dynamics only consume the
    combination in :func:`gyroscopic_coefficients`, which agrees.
    """
    a = table.as_array()
    return a + np.swapaxes(a, 0, 1)


def lambda_table(lam: InertiaSpectrum) -> np.ndarray:
    """Quadratic-coupling table l_ij = (lam - lam_i)/lam_k, k the third index."""
    l = lam.as_array()
    total = float(lam.total)
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            out[i, j] = (total - l[i]) / l[k]
    return out


def gyroscopic_coefficients(lam: InertiaSpectrum,
                            mode: ChristoffelMode = ChristoffelMode.KOSZUL) -> np.ndarray:
    """Coefficients G_i of the quadratic terms in the angular momentum law.

    The E_i equation carries G_i Y_j Y_k with (i, j, k) cyclic.  In PAPER
    mode these come from the coupling-table differences l_jk - l_kj, in
    KOSZUL mode from symmetrizing the connection table; the two arithmetic
    routes produce the same numbers,
        G = ((lam3 - lam2)/lam1, (lam1 - lam3)/lam2, (lam2 - lam1)/lam3),
    which is what makes the assembled momentum equations independent of
    the table choice.
    """
    mode = ChristoffelMode(mode)
    if mode is ChristoffelMode.PAPER:
        lt = lambda_table(lam)
        return np.array([lt[1, 2] - lt[2, 1], lt[2, 0] - lt[0, 2], lt[0, 1] - lt[1, 0]])
    sym = symmetric_part(christoffel(lam, mode))
    return np.array([sym[1, 2, 0], sym[2, 0, 1], sym[0, 1, 2]])


@dataclass(frozen=True)
class AlphaCoefficients:
    """The three constants appearing in the covariant differentials."""

    a1: float
    a2: float
    a3: float

    @classmethod
    def from_spectrum(cls, lam: InertiaSpectrum) -> "AlphaCoefficients":
        total = float(lam.total)
        l1, l2, l3 = (float(v) for v in lam.as_tuple())
        return cls(a1=(total - l2) / l1, a2=l1 / l2, a3=(total - l1) / l3)


def covariant_differential_frame(alpha: AlphaCoefficients, index: int) -> MixedTensor:
    """Covariant differential of a frame element, as a mixed tensor.

    ``index`` runs over the frame order (p1, p2, p3, E1, E2, E3); the
    horizontal elements are parallel, and

        D(E1) = (a2+1) W3 x E2 + (a3-1) W2 x E3
        D(E2) = (a1-1) W3 x E1 +  a3    W1 x E3
        D(E3) =  a1    W2 x E1 +  a2    W1 x E2

    stored with rows = output frame element and columns = direction slot.
    """
    if not 0 <= index < 6:
        raise ValueError("frame index must be in 0..5")
    t = MixedTensor.zeros()
    if index < 3:
        return t
    a1, a2, a3 = alpha.a1, alpha.a2, alpha.a3
    vv = t.vv
    if index == 3:
        vv[1, 2] = a2 + 1.0
        vv[2, 1] = a3 - 1.0
    elif index == 4:
        vv[0, 2] = a1 - 1.0
        vv[2, 0] = a3
    else:
        vv[0, 1] = a1
        vv[1, 0] = a2
    return t


def covariant_differential_coframe(alpha: AlphaCoefficients, index: int) -> MixedTensor:
    """Covariant differential of a coframe element ((0,2)-tensor).

    ``index`` runs over the coframe order (d1, d2, d3, W1, W2, W3); the
    horizontal coforms are parallel, and

        D(W1) = -a1 W2 x W3 - (a1-1) W3 x W2
        D(W2) = -a2 W1 x W3 - (a2+1) W3 x W1
        D(W3) = -a3 W1 x W2 - (a3-1) W2 x W1

    stored with rows = direction slot and columns = second coframe slot.
    Entrywise dual to :func:`covariant_differential_frame`:
    <D(W_i), E_j> + <W_i, D(E_j)> = 0.
    """
    if not 0 <= index < 6:
        raise ValueError("coframe index must be in 0..5")
    t = MixedTensor.zeros()
    if index < 3:
        return t
    a1, a2, a3 = alpha.a1, alpha.a2, alpha.a3
    vv = t.vv
    if index == 3:
        vv[1, 2] = -a1
        vv[2, 1] = -(a1 - 1.0)
    elif index == 4:
        vv[0, 2] = -a2
        vv[2, 0] = -(a2 + 1.0)
    else:
        vv[0, 1] = -a3
        vv[1, 0] = -(a3 - 1.0)
    return t
