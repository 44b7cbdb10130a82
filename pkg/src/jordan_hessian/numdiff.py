"""Central finite differences with Richardson extrapolation.

This module is the independent oracle for derivative tensors. It only ever
calls the scalar (or tensor) function it is handed, never an exact derivative
evaluator, so it can be used to cross-check them.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Callable, Optional

import numpy as np

from .config import StencilConfig
from .errors import StencilDomainError

# 1-D central stencils (offsets in units of h, weights before division by h^m).
# Each has an error expansion in even powers of h, and so does any tensor
# product of them, which is what makes the Richardson factor 4**m valid.
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def symmetrize(t: np.ndarray) -> np.ndarray:
    """Average a tensor over all permutations of its axes."""
    t = np.asarray(t, dtype=float)
    k = t.ndim
    if k < 2:
        return t.copy()
    perms = list(itertools.permutations(range(k)))
    acc = np.zeros_like(t)
    for p in perms:
        acc += np.transpose(t, p)
    return acc / len(perms)


def _richardson(estimates: list) -> np.ndarray:
    """Extrapolate estimates at steps h, h/2, h/4, ... (even-power error)."""
    table = [np.asarray(e, dtype=float) for e in estimates]
    for m in range(1, len(table)):
        factor = 4.0**m
        table = [
            (factor * table[i + 1] - table[i]) / (factor - 1.0)
            for i in range(len(table) - 1)
        ]
    return table[0]


class _CachedEvaluator:
    """Evaluate f at x + h * offsets, memoising on the integer offset pattern."""

    def __init__(self, f, x, h, domain):
        self.f = f
        self.x = x
        self.h = h
        self.domain = domain
        self.cache = {}

    def __call__(self, offsets: tuple) -> float:
        key = tuple(sorted(offsets))
        if key not in self.cache:
            pt = self.x.copy()
            for i, o in key:
                pt[i] += o * self.h
            if self.domain is not None and not self.domain(pt):
                raise StencilDomainError(f"stencil point {pt} outside domain")
            val = float(self.f(pt))
            if not math.isfinite(val):
                raise StencilDomainError(f"non-finite value at stencil point {pt}")
            self.cache[key] = val
        return self.cache[key]


def _mixed_partial(ev: _CachedEvaluator, index_tuple: tuple) -> float:
    counts = Counter(index_tuple)
    coords = sorted(counts)
    stencils = [_STENCILS[counts[c]] for c in coords]
    total = 0.0
    for combo in itertools.product(*[range(len(s[0])) for s in stencils]):
        w = 1.0
        offs = []
        for c, s, j in zip(coords, stencils, combo):
            w *= s[1][j]
            if s[0][j] != 0:
                offs.append((c, s[0][j]))
        if w != 0.0:
            total += w * ev(tuple(offs))
    return total / ev.h ** len(index_tuple)


def fd_derivative(
    f: Callable[[np.ndarray], float],
    x,
    order: int,
    cfg: Optional[StencilConfig] = None,
    domain: Optional[Callable[[np.ndarray], bool]] = None,
) -> np.ndarray:
    """Symmetric derivative tensor of a scalar field by central differences.

    Only non-decreasing index tuples are computed; the rest of the tensor is
    filled by symmetry. Tuples are visited in sorted order so the result does
    not depend on anything but the inputs.

    Parameters
    ----------
    f : callable
        Scalar field, ``f(x) -> float``.
    x : array_like
        Evaluation point.
    order : int
        Derivative order, 1 to 4.
    cfg : StencilConfig, optional
    domain : callable, optional
        Predicate; a stencil point for which it is false raises
        :class:`StencilDomainError`.
    """
    cfg = cfg or StencilConfig()
    if order not in _STENCILS:
        raise ValueError("order must be 1, 2, 3 or 4")
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if order == 4 and n > cfg.max_dim_order4:
        raise ValueError(
            f"order-4 differences limited to dim <= {cfg.max_dim_order4} (got {n})"
        )
    h0 = cfg.step(float(np.linalg.norm(x)))
    tuples = list(itertools.combinations_with_replacement(range(n), order))

    estimates = []
    for level in range(cfg.richardson_levels):
        ev = _CachedEvaluator(f, x, h0 / 2**level, domain)
        estimates.append(np.array([_mixed_partial(ev, t) for t in tuples]))
    flat = _richardson(estimates)

    out = np.zeros((n,) * order)
    for t, val in zip(tuples, flat):
        for p in set(itertools.permutations(t)):
            out[p] = val
    return out


def fd_jacobian(
    fn: Callable[[np.ndarray], np.ndarray],
    x,
    cfg: Optional[StencilConfig] = None,
    domain: Optional[Callable[[np.ndarray], bool]] = None,
    length: Optional[float] = None,
) -> np.ndarray:
    """Derivative of an array-valued function; the new axis is appended last.

    ``length`` is a local length scale of ``fn`` (e.g. distance to a
    singularity); when given, the step is ``base_step * length``.
    """
    cfg = cfg or StencilConfig()
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    h0 = cfg.step(float(np.linalg.norm(x))) if length is None else cfg.base_step * float(length)
    estimates = []
    for level in range(cfg.richardson_levels):
        h = h0 / 2**level
        cols = []
        for i in range(n):
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            if domain is not None and not (domain(xp) and domain(xm)):
                raise StencilDomainError(f"stencil around {x} leaves the domain")
            d = (np.asarray(fn(xp), dtype=float) - np.asarray(fn(xm), dtype=float)) / (2 * h)
            if not np.all(np.isfinite(d)):
                raise StencilDomainError(f"non-finite difference at {x}")
            cols.append(d)
        estimates.append(np.stack(cols, axis=-1))
    return _richardson(estimates)


def fd_consistency(
    f: Callable[[np.ndarray], float],
    exact_tensor,
    x,
    order: int,
    cfg: Optional[StencilConfig] = None,
    domain: Optional[Callable[[np.ndarray], bool]] = None,
) -> float:
    """Relative max-norm gap between ``fd_derivative`` and a supplied tensor."""
    exact = np.asarray(exact_tensor, dtype=float)
    approx = fd_derivative(f, x, order, cfg, domain)
    if approx.shape != exact.shape:
        raise ValueError(f"shape mismatch {approx.shape} vs {exact.shape}")
    scale = float(np.max(np.abs(exact))) if exact.size else 0.0
    gap = float(np.max(np.abs(approx - exact))) if exact.size else 0.0
    return gap / scale if scale > 0 else gap
