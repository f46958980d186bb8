"""Lovasz extension, the hinge surrogate built on it, subgradients, and the
simplex decomposition of the unit cube along sorted coordinates.

The canonical ordering permutation sorts descending with ties broken by
ascending index, which makes every kink-point output deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .setfn import SetFunction, as_collection


def descending_order(x: np.ndarray) -> np.ndarray:
    """Indices sorting x descending, ties by ascending index."""
    return np.argsort(-np.asarray(x), kind="stable")


def lovasz_extension(f: SetFunction, x) -> float:
    """Piecewise-linear extension of f at a nonnegative point.

    F(x) = sum_i x_{pi_i} (f(S_{pi,i}) - f(S_{pi,i-1})) for pi sorting x
    descending; equals the max of that expression over all orderings when f
    is submodular.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (f.k,):
        raise ValueError(f"x has shape {x.shape}, expected ({f.k},)")
    if np.any(x < 0):
        raise ValueError("extension is defined on the nonnegative orthant only")
    total, mask, prev = 0.0, 0, float(f.values[0])
    for i in descending_order(x):
        mask |= 1 << int(i)
        cur = f.values[mask]
        total += x[i] * (cur - prev)
        prev = cur
    return float(total)


def extension_batch(f: SetFunction, xs: np.ndarray) -> np.ndarray:
    """lovasz_extension row-wise over an (n, k) nonnegative array."""
    xs = np.asarray(xs, dtype=float)
    order = np.argsort(-xs, axis=1, kind="stable")
    masks = np.bitwise_or.accumulate(1 << order, axis=1)
    vals = f.values[masks]
    gains = np.diff(vals, axis=1, prepend=float(f.values[0]))
    return (np.take_along_axis(xs, order, axis=1) * gains).sum(axis=1)


def clip(u) -> np.ndarray:
    """Clamp each coordinate to [-1, 1], preserving sign."""
    return np.clip(np.asarray(u, dtype=float), -1.0, 1.0)


def hinge(fc, u, y) -> float:
    """Surrogate loss F_y((1 - u * y)_+) for label y and prediction u."""
    fc = as_collection(fc)
    u = np.asarray(u, dtype=float)
    f = fc.for_label(_label_bits(y, fc.k))
    w = np.maximum(1.0 - u * _label_vec(y, fc.k), 0.0)
    return lovasz_extension(f, w)


def hinge_batch(fc, us: np.ndarray, y) -> np.ndarray:
    """hinge over rows of us against one fixed label."""
    fc = as_collection(fc)
    f = fc.for_label(_label_bits(y, fc.k))
    w = np.maximum(1.0 - np.asarray(us, dtype=float) * _label_vec(y, fc.k), 0.0)
    return extension_batch(f, w)


def hinge_subgradient(fc, u, y) -> np.ndarray:
    """One element of the subdifferential of u -> hinge(fc, u, y).

    With w = (1 - u*y)_+ sorted by the canonical pi, coordinate i gets
    -y_i times the table gain at its sorted position, zeroed where the
    hinge is inactive; exact kinks (1 - u_i y_i = 0) count as inactive.
    """
    fc = as_collection(fc)
    u = np.asarray(u, dtype=float)
    yv = _label_vec(y, fc.k)
    f = fc.for_label(_label_bits(y, fc.k))
    margins = 1.0 - u * yv
    w = np.maximum(margins, 0.0)
    g = np.zeros(fc.k)
    mask, prev = 0, float(f.values[0])
    for i in descending_order(w):
        i = int(i)
        mask |= 1 << i
        cur = f.values[mask]
        if margins[i] > 0.0:
            g[i] = -yv[i] * (cur - prev)
        prev = cur
    return g


def expected_hinge(fc, u, p) -> float:
    """E_{Y~p} hinge(fc, u, Y); only labels with positive mass are visited."""
    fc = as_collection(fc)
    p = np.asarray(p, dtype=float)
    if p.shape != (1 << fc.k,):
        raise ValueError(f"p has shape {p.shape}, expected ({1 << fc.k},)")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("p must be a probability vector summing to 1")
    total = 0.0
    for y in np.nonzero(p)[0]:
        total += p[y] * hinge(fc, u, int(y))
    return total


@dataclass(frozen=True)
class OrderedDecomposition:
    """A point of [0,1]^k written as a convex combination of sorted-prefix
    indicator vertices: x = sum_{i>=1} alphas[i] * 1_{pi,i}, alphas[0] = 1 - max(x)."""

    pi: tuple[int, ...]
    alphas: np.ndarray
    vertices: tuple[int, ...]  # bitmask of 1_{pi,i} for i = 0..k

    def reconstruct(self) -> np.ndarray:
        k = len(self.pi)
        x = np.zeros(k)
        for i in range(1, k + 1):
            for j in self.pi[:i]:
                x[j] += self.alphas[i]
        return x


def simplex_decompose(x) -> OrderedDecomposition:
    """Decompose x in [0,1]^k over the chain of sorted-prefix vertices."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("simplex decomposition needs x in [0,1]^k")
    order = descending_order(x)
    xs = x[order]
    k = len(x)
    alphas = np.empty(k + 1)
    alphas[0] = 1.0 - xs[0]
    alphas[1:k] = xs[:-1] - xs[1:]
    alphas[k] = xs[-1]
    vertices, mask = [0], 0
    for i in order:
        mask |= 1 << int(i)
        vertices.append(mask)
    return OrderedDecomposition(tuple(int(i) for i in order), alphas, tuple(vertices))


def _label_bits(y, k: int) -> int:
    from .setfn import Label

    if isinstance(y, Label):
        return y.bits
    if isinstance(y, (int, np.integer)):
        return int(y)
    return Label.from_signs(y).bits


def _label_vec(y, k: int) -> np.ndarray:
    bits = _label_bits(y, k)
    return np.where((bits >> np.arange(k)) & 1 == 1, 1.0, -1.0)
