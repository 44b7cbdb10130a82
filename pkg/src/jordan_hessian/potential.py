"""Hessian potentials built from metrised Jordan algebras.

Three constructions are provided:

* the power series ``F(x) = sum_{k>=2} (-1)^k / k * sigma(x, x^{k-1})``,
  whose derivatives have closed forms in terms of ``(I + L_x)^{-1}``;
* the log-det potential ``-sum_j d_j log(1 + lambda_j(x))`` of a Euclidean
  family, weighted per simple block when the form is a weighted trace form;
* canonical barriers ``-sum_j a_j log det (x - c)_j + offset`` on products of
  symmetric cones.

Everything is wrapped in :class:`PotentialField`, which the geometry module
consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import algebra as alg
from .algebra import MetrisedAlgebra
from .config import DEFAULT, JACOBIAN_STENCIL, StencilConfig
from .errors import (
    ConvergenceError,
    DimensionError,
    DivergenceError,
    DomainError,
    NotJordanError,
    SpectralDomainError,
)
from .numdiff import fd_derivative, fd_jacobian, symmetrize

EXACT = "exact"
FD = "finite-difference"


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Scalar field with derivative access up to order 4.

    ``derivatives`` maps an order to an evaluator; ``tags`` records whether
    that evaluator is exact or itself a finite difference. Orders without an
    evaluator fall back to :func:`numdiff.fd_derivative` on ``value``.
    """

    dim: int
    value_fn: Callable[[np.ndarray], float]
    derivatives: Mapping[int, Callable] = field(default_factory=dict)
    tags: Mapping[int, str] = field(default_factory=dict)
    domain_fn: Optional[Callable[[np.ndarray], bool]] = None
    provenance: str = "user_expression"
    source: object = None
    stencil: StencilConfig = field(default_factory=StencilConfig)

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise DimensionError(f"point has dim {x.size}, field has dim {self.dim}")
        return x

    def in_domain(self, x) -> bool:
        x = self._point(x)
        return True if self.domain_fn is None else bool(self.domain_fn(x))

    def _check(self, x) -> np.ndarray:
        x = self._point(x)
        if not self.in_domain(x):
            raise DomainError(f"point {x} outside the domain of the {self.provenance} field")
        return x

    def value(self, x) -> float:
        return float(self.value_fn(self._check(x)))

    __call__ = value

    def source_tag(self, order: int) -> str:
        return self.tags.get(order, FD) if order in self.derivatives else FD

    def derivative(self, x, order: int) -> np.ndarray:
        if order == 0:
            return np.asarray(self.value(x))
        x = self._check(x)
        if order in self.derivatives:
            return np.asarray(self.derivatives[order](x), dtype=float)
        return fd_derivative(self.value_fn, x, order, self.stencil, self.domain_fn)

    def gradient(self, x) -> np.ndarray:
        return self.derivative(x, 1)

    def hessian(self, x) -> np.ndarray:
        return self.derivative(x, 2)

    def third(self, x) -> np.ndarray:
        return self.derivative(x, 3)

    def fourth(self, x) -> np.ndarray:
        return self.derivative(x, 4)


def scaled_field(P: PotentialField, c: float) -> PotentialField:
    """The field c * F, keeping exactness tags."""
    derivs = {k: (lambda x, f=f: c * np.asarray(f(x))) for k, f in P.derivatives.items()}
    return PotentialField(
        dim=P.dim,
        value_fn=lambda x: c * P.value_fn(x),
        derivatives=derivs,
        tags=dict(P.tags),
        domain_fn=P.domain_fn,
        provenance=P.provenance,
        source=P.source,
        stencil=P.stencil,
    )


def _fourth_from_third(third, domain, length_fn=None, cfg=JACOBIAN_STENCIL):
    def fourth(x):
        length = None if length_fn is None else length_fn(x)
        return symmetrize(fd_jacobian(third, x, cfg, domain, length))

    return fourth


# --------------------------------------------------------------------------
# power series potential


def series_potential(M: MetrisedAlgebra, x, rel_tol: float = 1e-15, max_terms: int = 500) -> float:
    """Partial sums of the series until three consecutive terms are negligible."""
    A = M.algebra
    x = np.asarray(x, dtype=float)
    if x.shape != (M.dim,):
        raise DimensionError("point dimension mismatch")
    if alg.spectral_radius(A, x) >= 1.0:
        raise DivergenceError("spectral radius of L_x must be < 1")
    L = alg.left_mult(A, x)
    Sx = M.sigma @ x
    xk = x.copy()  # x^{k-1}
    total = 0.0
    small = 0
    for k in range(2, max_terms + 2):
        term = (-1.0) ** k / k * float(Sx @ xk)
        total += term
        if abs(term) < rel_tol * (1.0 + abs(total)):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
        xk = L @ xk
    raise ConvergenceError(f"series did not converge within {max_terms} terms")


def _resolvent(A, x):
    n = A.dim
    R = np.eye(n) + alg.left_mult(A, x)
    try:
        return np.linalg.inv(R)
    except np.linalg.LinAlgError as exc:
        raise DomainError("I + L_x is singular") from exc


def series_gradient(M: MetrisedAlgebra, x) -> np.ndarray:
    """Covector u -> sigma((I + L_x)^{-1} x, u)."""
    x = np.asarray(x, dtype=float)
    n = M.dim
    try:
        y = np.linalg.solve(np.eye(n) + alg.left_mult(M.algebra, x), x)
    except np.linalg.LinAlgError as exc:
        raise DomainError("I + L_x is singular") from exc
    return M.sigma @ y


def series_hessian(M: MetrisedAlgebra, x) -> np.ndarray:
    A = M.algebra
    x = np.asarray(x, dtype=float)
    Ri = _resolvent(A, x)
    y = Ri @ x
    SR = M.sigma @ Ri
    n = M.dim
    H = np.empty((n, n))
    for b in range(n):
        v = np.zeros(n)
        v[b] = 1.0
        # sigma(R^{-1} v, u) - sigma(R^{-1} L_v R^{-1} x, u), as a covector in u
        H[:, b] = SR @ v - SR @ alg.multiply(A, v, y)
    return H


def series_third(M: MetrisedAlgebra, x) -> np.ndarray:
    """Third derivative by polarizing the directional formula for nabla_v^2 nabla_u F."""
    A = M.algebra
    x = np.asarray(x, dtype=float)
    Ri = _resolvent(A, x)
    y = Ri @ x
    SR = M.sigma @ Ri
    n = M.dim

    def diag(v):
        # covector u -> -2 sigma(R L_v R v, u) + 2 sigma(R L_v R L_v R x, u)
        Lv = alg.left_mult(A, v)
        return -2.0 * SR @ (Lv @ (Ri @ v)) + 2.0 * SR @ (Lv @ (Ri @ (Lv @ y)))

    T = np.empty((n, n, n))
    eye = np.eye(n)
    for b in range(n):
        for c in range(b, n):
            col = 0.25 * (diag(eye[b] + eye[c]) - diag(eye[b] - eye[c]))
            T[:, b, c] = col
            T[:, c, b] = col
    return symmetrize(T)


def series_field(M: MetrisedAlgebra, check_jordan: bool = True, jordan_tol: float = DEFAULT.jordan_tol) -> PotentialField:
    """Series potential as a field on {x : rho(L_x) < 1}.

    The closed-form derivatives rely on power-associativity. If the algebra is
    not Jordan and ``check_jordan`` is false, the field is still built but
    every derivative comes from finite differences of the series value.
    """
    A = M.algebra
    scale = max(1.0, float(np.max(np.abs(A.structure)))) ** 3
    is_jordan = alg.jordan_residual(A, method="basis") <= jordan_tol * scale if A.dim <= 12 else (
        alg.jordan_residual(A) <= jordan_tol * scale
    )
    if check_jordan and not is_jordan:
        raise NotJordanError("series potential needs a Jordan algebra")

    def domain(x):
        return alg.spectral_radius(A, x) < 1.0

    if not is_jordan:
        return PotentialField(M.dim, lambda x: series_potential(M, x), domain_fn=domain, provenance="series", source=M)

    third = lambda x: series_third(M, x)
    return PotentialField(
        dim=M.dim,
        value_fn=lambda x: series_potential(M, x),
        derivatives={
            1: lambda x: series_gradient(M, x),
            2: lambda x: series_hessian(M, x),
            3: third,
            4: _fourth_from_third(third, domain, lambda x: 1.0 - alg.spectral_radius(A, x)),
        },
        tags={1: EXACT, 2: EXACT, 3: EXACT, 4: FD},
        domain_fn=domain,
        provenance="series",
        source=M,
    )


# --------------------------------------------------------------------------
# log-det potential


def _simple_weights(M: MetrisedAlgebra) -> np.ndarray:
    return alg.factor_weights(M)


def logdet_potential(M: MetrisedAlgebra, x) -> float:
    """-sum_b w_b sum_j d_j log(1 + lambda_j(x_b)) over simple blocks b.

    With the trace form (all weights 1) this is -log det(e + x).
    """
    A = M.algebra
    x = np.asarray(x, dtype=float)
    w = _simple_weights(M)
    total = 0.0
    for wb, (f, s) in zip(w, A.simple_blocks()):
        sd = alg._group(*zip(*alg._block_pieces(f, x[s])), rtol=DEFAULT.grouping_rtol)
        if np.any(sd.eigenvalues <= -1.0):
            raise SpectralDomainError("e + x must have positive eigenvalues")
        total -= wb * float(np.sum(sd.multiplicities * np.log1p(sd.eigenvalues)))
    return total


def logdet_gradient(M: MetrisedAlgebra, x) -> np.ndarray:
    """Covector u -> -sigma((e + x)^{-1}, u)."""
    A = M.algebra
    x = np.asarray(x, dtype=float)
    _simple_weights(M)
    y = alg.inverse(A, alg.unit(A) + x)
    return -(M.sigma @ y)


def logdet_hessian(M: MetrisedAlgebra, x, cfg: StencilConfig = JACOBIAN_STENCIL) -> np.ndarray:
    H = fd_jacobian(lambda z: logdet_gradient(M, z), x, cfg)
    return 0.5 * (H + H.T)


# --------------------------------------------------------------------------
# canonical barriers


@dataclass(frozen=True, eq=False)
class BarrierSpec:
    """F(x) = -sum_j weight_j log det (x - center)_j + offset."""

    factors: tuple  # of (MetrisedAlgebra, weight)
    center: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        factors = tuple((m, float(w)) for m, w in self.factors)
        if not factors:
            raise ValueError("barrier needs at least one factor")
        for m, w in factors:
            if not w > 0:
                raise ValueError("barrier weights must be positive")
            if m.algebra.family is None:
                raise alg.UnsupportedFamilyError("barrier factors must carry a Euclidean family tag")
        object.__setattr__(self, "factors", factors)
        c = np.array(self.center if self.center is not None else np.zeros(self.dim), dtype=float)
        if c.shape != (self.dim,):
            raise DimensionError("center dimension mismatch")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return sum(m.dim for m, _ in self.factors)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.factors])

    def slices(self) -> list:
        out, start = [], 0
        for m, w in self.factors:
            out.append((m, w, slice(start, start + m.dim)))
            start += m.dim
        return out

    def algebra(self) -> MetrisedAlgebra:
        """The product algebra with form sum_j w_j tau_j."""
        parts = [alg.metrised(m.algebra) for m, _ in self.factors]
        return alg.direct_sum(parts, list(self.weights))


def barrier_spec(factors: Sequence, center=None, offset: float = 0.0) -> BarrierSpec:
    return BarrierSpec(tuple(factors), center, offset)


def homogeneity_parameter(spec: BarrierSpec) -> float:
    return -float(sum(w * m.dim for m, w in spec.factors))


def canonical_barrier(spec: BarrierSpec, margin: float = DEFAULT.domain_margin) -> PotentialField:
    """Canonical barrier as a field on the interior of the product cone.

    Per factor, the derivatives of ``-log det(delta)`` are the series closed
    forms of the factor's trace-form algebra evaluated at ``delta - e``
    (there ``I + L_x = L_delta``), with the gradient shifted by the linear
    term ``tr L``. Blocks are assembled separately so cross-factor entries
    are exactly zero.
    """
    pieces = []
    for m, w, s in spec.slices():
        A = m.algebra
        tau_m = alg.metrised(A)
        pieces.append((A, tau_m, w, s, alg.unit(A), alg.trace_vector(A)))
    c = spec.center
    n = spec.dim

    def domain(x):
        delta = x - c
        tol = margin * float(np.linalg.norm(delta))
        for A, _, _, s, _, _ in pieces:
            lam = alg.spectral(A, delta[s]).eigenvalues
            if not np.all(lam > tol):
                return False
        return True

    def length(x):
        # smallest spectral value of delta: derivatives scale with it
        delta = x - c
        return min(float(np.min(alg.spectral(A, delta[s]).eigenvalues)) for A, _, _, s, _, _ in pieces)

    def value(x):
        delta = x - c
        return spec.offset - sum(w * alg.logdet(A, delta[s]) for A, _, w, s, _, _ in pieces)

    def grad(x):
        delta = x - c
        g = np.zeros(n)
        for A, tm, w, s, _, _ in pieces:
            g[s] = -w * (tm.sigma @ alg.inverse(A, delta[s]))
        return g

    def hess(x):
        delta = x - c
        H = np.zeros((n, n))
        for A, tm, w, s, e, _ in pieces:
            H[s, s] = w * series_hessian(tm, delta[s] - e)
        return 0.5 * (H + H.T)

    def third(x):
        delta = x - c
        T = np.zeros((n, n, n))
        for A, tm, w, s, e, _ in pieces:
            T[s, s, s] = w * series_third(tm, delta[s] - e)
        return T

    return PotentialField(
        dim=n,
        value_fn=value,
        derivatives={1: grad, 2: hess, 3: third, 4: _fourth_from_third(third, domain, length)},
        tags={1: EXACT, 2: EXACT, 3: EXACT, 4: FD},
        domain_fn=domain,
        provenance="canonical_barrier",
        source=spec,
    )


# --------------------------------------------------------------------------
# simple user fields


def quadratic_field(Q) -> PotentialField:
    """F(x) = x^T Q x / 2, all derivatives exact."""
    Q = np.array(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    n = Q.shape[0]
    return PotentialField(
        dim=n,
        value_fn=lambda x: 0.5 * float(x @ Q @ x),
        derivatives={
            1: lambda x: Q @ x,
            2: lambda x: Q.copy(),
            3: lambda x: np.zeros((n, n, n)),
            4: lambda x: np.zeros((n, n, n, n)),
        },
        tags={1: EXACT, 2: EXACT, 3: EXACT, 4: EXACT},
        provenance="user_expression",
        source=Q,
    )


def user_field(fn, dim: int, domain=None, derivatives=None, stencil: Optional[StencilConfig] = None) -> PotentialField:
    derivatives = dict(derivatives or {})
    return PotentialField(
        dim=dim,
        value_fn=lambda x: float(fn(x)),
        derivatives=derivatives,
        tags={k: EXACT for k in derivatives},
        domain_fn=domain,
        provenance="user_expression",
        stencil=stencil or StencilConfig(),
    )
