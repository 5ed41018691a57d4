"""Arithmetic on the flat n-torus R^n / (w Z)^n.

Points and displacements are plain float64 arrays.  A vector is *reduced*
when every component lies in [-w/2, w/2]; ``reduce`` picks the coset
representative with this property, sending exact ties to +w/2 so that all
downstream computations are deterministic.  Iterative solvers keep their
state unreduced and call ``reduce`` only on differences, which is what the
reflect and increment rules below expect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TorusConfig:
    """Dimension and width of the torus."""

    n: int
    w: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not self.w > 0:
            raise ValueError(f"width must be > 0, got {self.w}")


def reduce(y, w):
    """Reduce ``y`` modulo (wZ)^n to the representative in (-w/2, w/2].

    Componentwise: subtracts the nearest multiple of ``w``, with exact
    half-width ties resolved to +w/2.  Idempotent bitwise; for w = 1 the
    output differs from the input by an exact integer.
    """
    y = np.asarray(y, dtype=np.float64)
    half = 0.5 * w
    k = np.ceil(y / w - 0.5)
    # components already in canonical range keep their bits untouched
    k = np.where((y > -half) & (y <= half), 0.0, k)
    out = y - w * k
    # guard against division rounding at the boundary for unrepresentable w
    out = np.where(out > half, out - w, out)
    out = np.where(out <= -half, out + w, out)
    return out


def torus_distance(x, xp, w):
    """Euclidean length of the reduced difference, the torus metric."""
    x = np.asarray(x, dtype=np.float64)
    xp = np.asarray(xp, dtype=np.float64)
    if x.shape != xp.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {xp.shape}")
    return float(np.linalg.norm(reduce(x - xp, w)))


def torus_reflect(x, p, w):
    """Reflect ``x`` through the nearest coset representative of ``p``.

    Returns x + 2 [p - x]_w; with no wrap active this is the ordinary
    Euclidean reflection 2p - x.
    """
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if x.shape != p.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {p.shape}")
    return x + 2.0 * reduce(p - x, w)


def torus_increment(x, d, beta, w):
    """Advance ``x`` by beta times the reduced difference ``d``.

    The output is intentionally left unreduced; callers reduce on demand.
    """
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if x.shape != d.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {d.shape}")
    return x + beta * reduce(d, w)
