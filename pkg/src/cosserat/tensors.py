"""Mixed (1,1)-tensors on the frame bundle.

A MixedTensor stores a 6x6 coefficient array over the frame
``(p1, p2, p3, E1, E2, E3)`` (rows: horizontal coordinate directions then
vertical invariant fields) and the coframe ``(d1, d2, d3, W1, W2, W3)``
(columns).  Blocks:

    hh = rows p, cols d      hv = rows p, cols W
    vh = rows E, cols d      vv = rows E, cols W
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FRAME_LABELS = ("p1", "p2", "p3", "E1", "E2", "E3")
COFRAME_LABELS = ("d1", "d2", "d3", "W1", "W2", "W3")


@dataclass
class MixedTensor:
    data: np.ndarray = field(default_factory=lambda: np.zeros((6, 6)))

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != (6, 6):
            raise ValueError(f"expected a 6x6 array, got {self.data.shape}")

    @classmethod
    def zeros(cls) -> "MixedTensor":
        return cls(np.zeros((6, 6)))

    @classmethod
    def from_blocks(cls, hh=None, hv=None, vh=None, vv=None) -> "MixedTensor":
        t = cls.zeros()
        if hh is not None:
            t.data[:3, :3] = hh
        if hv is not None:
            t.data[:3, 3:] = hv
        if vh is not None:
            t.data[3:, :3] = vh
        if vv is not None:
            t.data[3:, 3:] = vv
        return t

    @property
    def hh(self) -> np.ndarray:
        return self.data[:3, :3]

    @property
    def hv(self) -> np.ndarray:
        return self.data[:3, 3:]

    @property
    def vh(self) -> np.ndarray:
        return self.data[3:, :3]

    @property
    def vv(self) -> np.ndarray:
        return self.data[3:, 3:]

    def trace_full(self) -> float:
        return float(np.trace(self.data))

    def trace_vertical(self) -> float:
        return float(np.trace(self.vv))

    def __add__(self, other: "MixedTensor") -> "MixedTensor":
        return MixedTensor(self.data + other.data)

    def __sub__(self, other: "MixedTensor") -> "MixedTensor":
        return MixedTensor(self.data - other.data)

    def __mul__(self, s: float) -> "MixedTensor":
        return MixedTensor(self.data * float(s))

    __rmul__ = __mul__

    def contract(self, other: "MixedTensor") -> float:
        """Full entrywise contraction sum_ab self_ab other_ab."""
        return float(np.sum(self.data * other.data))


def trace_full(t: MixedTensor) -> float:
    """Sum of the six diagonal coefficients."""
    return t.trace_full()


def trace_vertical(t: MixedTensor) -> float:
    """Sum of the vertical-block diagonal coefficients."""
    return t.trace_vertical()
