"""Constraint projectors for divide-and-concur sphere packing.

Two constraint sets act on the replicated sphere centers:

* *disjointness* (one pair of copies at a time): move the two centers the
  minimum total distance so their spheres no longer intersect, subject to
  the torus box bound on the reduced difference vector;
* *concurrence* (one sphere at a time): replace all copies of a center by
  the single circle point minimizing the weighted sum of squared torus
  distances, solved per coordinate by cutting the circle at each sample.

Both projectors operate on reduced quantities and are exact up to floating
point.  Degenerate inputs (a zero direction where a positive norm is still
required) are resolved with a caller-supplied random generator, since the
true projection is set-valued only on a measure-zero set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import reduce


@dataclass(frozen=True)
class PairProjectionResult:
    """Projected pair of centers; ``moved`` is False iff already disjoint."""

    x1: np.ndarray
    x2: np.ndarray
    moved: bool


def complete_to_norm(u, target_sq, w, rng):
    """Minimum-distance norm completion inside the torus box, batched.

    For each row u of the input, finds u' minimizing ||u' - u||_2 subject
    to ||u'||_inf <= w/2 and ||u'||_2^2 >= target_sq.  Rows must already be
    reduced.  The solution rescales u onto the norm shell; components that
    the rescaling pushes past +-w/2 are clamped there and the remaining
    block is re-solved with the residual squared-norm target.  Each pass
    clamps at least one component of every unfinished row and a clamped
    component contributes (w/2)^2, so the number of passes is tiny (at most
    four when target_sq equals w^2).

    Rows with a zero direction on the still-free block get a random
    direction drawn from ``rng``.
    """
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    p, n = u.shape
    half = 0.5 * w
    need = np.broadcast_to(np.asarray(target_sq, dtype=np.float64), (p,))
    work = u.copy()
    out = u.copy()
    free = np.ones((p, n), dtype=bool)
    active = np.ones(p, dtype=bool)

    for _ in range(n + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return out
        rem = need[idx] - (half * half) * (n - free[idx].sum(axis=1))
        done = rem <= 0.0
        if done.any():
            # clamped components alone reach the norm; free block stays put
            rows = idx[done]
            out[rows] = np.where(free[rows], u[rows], out[rows])
            active[rows] = False
            idx = idx[~done]
            rem = rem[~done]
            if idx.size == 0:
                return out
        fsub = np.where(free[idx], work[idx], 0.0)
        norm2 = np.einsum("ij,ij->i", fsub, fsub)
        if (norm2 == 0.0).any():
            for row in idx[norm2 == 0.0]:
                nfree = int(free[row].sum())
                if nfree == 0:
                    raise ValueError(
                        "norm target unreachable inside the torus box"
                    )
                d = rng.standard_normal(nfree)
                while not d.any():  # pragma: no cover - probability zero
                    d = rng.standard_normal(nfree)
                work[row, free[row]] = d
            fsub = np.where(free[idx], work[idx], 0.0)
            norm2 = np.einsum("ij,ij->i", fsub, fsub)
        scaled = fsub * np.sqrt(rem / norm2)[:, None]
        over = np.abs(scaled) > half
        grew = over.any(axis=1)
        fin = idx[~grew]
        if fin.size:
            out[fin] = np.where(free[fin], scaled[~grew], out[fin])
            active[fin] = False
        if grew.any():
            rows = idx[grew]
            clamp = over[grew]
            out[rows] = np.where(
                clamp, np.copysign(half, work[rows]), out[rows]
            )
            free[rows] &= ~clamp
    raise AssertionError("norm completion did not terminate")


def project_disjoint(x1, x2, r, w, rng=None):
    """Project one pair of centers onto the sphere-disjointness set.

    Leaves the pair untouched when the reduced separation already reaches
    2r; otherwise both centers move by opposite half-corrections so their
    new reduced difference is the nearest vector of length >= 2r inside the
    torus box.
    """
    if not r > 0:
        raise ValueError(f"radius must be > 0, got {r}")
    if 2.0 * r > w:
        raise ValueError(f"a tangent pair cannot fit: 2r={2 * r} > w={w}")
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape:
        raise ValueError(f"dimension mismatch: {x1.shape} vs {x2.shape}")
    u = reduce(x1 - x2, w)
    if float(u @ u) >= (2.0 * r) ** 2:
        return PairProjectionResult(x1.copy(), x2.copy(), False)
    if rng is None:
        rng = np.random.default_rng()
    uprime = complete_to_norm(u[None, :], (2.0 * r) ** 2, w, rng)[0]
    half_step = 0.5 * (uprime - u)
    return PairProjectionResult(x1 + half_step, x2 - half_step, True)


def circular_mean(values, weights, w):
    """Weighted least-squares mean on the width-w circle, batched.

    ``values`` holds reduced samples along the last axis; ``weights``
    broadcasts against it.  For each of the N ways of cutting the circle,
    the optimum within that ordering is the weighted centroid of the
    samples unwrapped at the cut; prefix sums give every cut's centroid and
    cost in one sweep.  Returns (mean, cost) with the mean reduced; ties
    between cuts go to the smallest sorted index.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.shape[-1] == 0:
        raise ValueError("cannot average zero samples")
    g = np.broadcast_to(np.asarray(weights, dtype=np.float64), v.shape)
    order = np.argsort(v, axis=-1, kind="stable")
    zs = np.take_along_axis(v, order, axis=-1)
    ws = np.take_along_axis(g, order, axis=-1)
    gz = ws * zs
    gtot = ws.sum(axis=-1, keepdims=True)
    s1 = gz.sum(axis=-1, keepdims=True)
    s2 = (gz * zs).sum(axis=-1, keepdims=True)
    # cut k promotes the k-th sorted sample to smallest on the circle;
    # samples below the cut are unwrapped upward by one period
    pg = np.cumsum(ws, axis=-1)
    pgz = np.cumsum(gz, axis=-1)
    pg = np.concatenate([np.zeros_like(pg[..., :1]), pg[..., :-1]], axis=-1)
    pgz = np.concatenate(
        [np.zeros_like(pgz[..., :1]), pgz[..., :-1]], axis=-1
    )
    mu = (s1 + w * pg) / gtot
    cost = s2 + (2.0 * w) * pgz + (w * w) * pg - gtot * mu * mu
    best = np.argmin(cost, axis=-1)[..., None]
    best_mu = np.take_along_axis(mu, best, axis=-1)[..., 0]
    best_cost = np.take_along_axis(cost, best, axis=-1)[..., 0]
    return reduce(best_mu, w), best_cost


def project_concur_1d(ys, weights, w):
    """Optimal concurrence point of N weighted samples on the circle.

    Returns (mean, cost) where the mean minimizes
    sum_j weights_j * [mean - ys_j]_w^2 over the circle.
    """
    ys = np.asarray(ys, dtype=np.float64)
    if ys.ndim != 1 or ys.size == 0:
        raise ValueError("ys must be a non-empty 1-d array")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != ys.shape:
        raise ValueError("weights must match ys")
    if not (weights > 0).all():
        raise ValueError("weights must be positive")
    mean, cost = circular_mean(reduce(ys, w), weights, w)
    return float(mean), float(cost)


def project_concur(copies, weights, w):
    """Concur a sphere's copies: per-coordinate circular weighted mean."""
    copies = np.asarray(copies, dtype=np.float64)
    if copies.ndim != 2 or copies.shape[0] == 0:
        raise ValueError("copies must be a non-empty (M, n) array")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (copies.shape[0],):
        raise ValueError("weights must have one entry per copy")
    if not (weights > 0).all():
        raise ValueError("weights must be positive")
    mean, _ = circular_mean(reduce(copies.T, w), weights, w)
    return mean
