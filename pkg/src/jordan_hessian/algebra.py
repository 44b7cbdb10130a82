"""Commutative algebras given by structure constants.

Products are stored as a dense array ``C[g, a, b]`` with
``(u * v)[g] = C[g, a, b] u[a] v[b]``. The Euclidean families (componentwise,
spin factor, real symmetric matrices) and explicit direct sums of them carry a
family tag, which unlocks the closed-form spectral calculus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .config import DEFAULT
from .errors import (
    DegenerateFormError,
    DimensionError,
    NotCommutativeError,
    SpectralDomainError,
    UnsupportedFamilyError,
)

FAMILY_KINDS = ("componentwise", "spin", "sym")
_COMMUTATIVITY_TOL = 1e-12


@dataclass(frozen=True)
class Family:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("family size must be >= 1")

    @property
    def dim(self) -> int:
        if self.kind == "sym":
            return self.n * (self.n + 1) // 2
        return self.n

    def __str__(self):
        return f"{self.kind}({self.n})"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JordanAlgebra:
    """Finite-dimensional commutative algebra.

    ``family`` is ``None`` for raw structure constants, a :class:`Family` for a
    single family instance, or a tuple of families laid out consecutively for a
    direct sum.
    """

    structure: np.ndarray
    family: Union[None, Family, tuple] = None

    def __post_init__(self):
        C = np.asarray(self.structure, dtype=float)
        if C.ndim != 3 or not (C.shape[0] == C.shape[1] == C.shape[2]) or C.shape[0] < 1:
            raise DimensionError(f"structure constants must be (n, n, n), got {C.shape}")
        gap = float(np.max(np.abs(C - C.transpose(0, 2, 1))))
        if gap > _COMMUTATIVITY_TOL * max(1.0, float(np.max(np.abs(C)))):
            raise NotCommutativeError(f"structure constants not symmetric (gap {gap:.3e})")
        object.__setattr__(self, "structure", _frozen(0.5 * (C + C.transpose(0, 2, 1))))
        if self.family is not None and sum(f.dim for f in self.blocks) != C.shape[0]:
            raise DimensionError("family layout does not match dimension")

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    @property
    def blocks(self) -> tuple:
        if self.family is None:
            return ()
        if isinstance(self.family, Family):
            return (self.family,)
        return tuple(self.family)

    def block_slices(self) -> list:
        out, start = [], 0
        for f in self.blocks:
            out.append((f, slice(start, start + f.dim)))
            start += f.dim
        return out

    def simple_blocks(self) -> list:
        """Block layout with componentwise(n) split into n one-dimensional blocks."""
        out = []
        for f, s in self.block_slices():
            if f.kind == "componentwise":
                out.extend((Family("componentwise", 1), slice(i, i + 1)) for i in range(s.start, s.stop))
            else:
                out.append((f, s))
        return out

    @property
    def is_euclidean_family(self) -> bool:
        return self.family is not None

    def __repr__(self):
        tag = "raw" if self.family is None else " + ".join(map(str, self.blocks))
        return f"JordanAlgebra(dim={self.dim}, {tag})"


@dataclass(frozen=True, eq=False)
class BilinearForm:
    matrix: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionError(f"form must be square, got {S.shape}")
        if not np.allclose(S, S.T, rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(S), initial=0)))):
            raise ValueError("bilinear form must be symmetric")
        object.__setattr__(self, "matrix", _frozen(0.5 * (S + S.T)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, u, v) -> float:
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))

    def is_degenerate(self, tol: float = 1e-12) -> bool:
        S = self.matrix
        scale = float(np.max(np.abs(S), initial=0.0))
        if scale == 0.0:
            return True
        return abs(np.linalg.det(S / scale)) < tol

    def is_positive_definite(self) -> bool:
        return bool(np.min(np.linalg.eigvalsh(self.matrix)) > 0)


@dataclass(frozen=True, eq=False)
class MetrisedAlgebra:
    algebra: JordanAlgebra
    form: BilinearForm
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not isinstance(self.form, BilinearForm):
            object.__setattr__(self, "form", BilinearForm(self.form))
        if self.form.dim != self.algebra.dim:
            raise DimensionError("form and algebra dimensions differ")
        if self.check:
            if self.form.is_degenerate():
                raise DegenerateFormError("degenerate form")
            res = invariance_residual(self.algebra, self.form, method="basis")
            scale = max(1.0, float(np.max(np.abs(self.form.matrix))))
            if res > DEFAULT.invariance_tol * scale * max(1.0, float(np.max(np.abs(self.algebra.structure)))):
                raise ValueError(f"form is not invariant (residual {res:.3e})")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def sigma(self) -> np.ndarray:
        return self.form.matrix


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    idempotents: np.ndarray  # shape (m, dim)
    eigenvalues: np.ndarray  # shape (m,)
    multiplicities: np.ndarray  # shape (m,)

    def reconstruct(self) -> np.ndarray:
        return self.eigenvalues @ self.idempotents

    def apply(self, fn) -> np.ndarray:
        """Spectral function sum_j fn(lambda_j) e^j."""
        return np.asarray([fn(l) for l in self.eigenvalues]) @ self.idempotents


# --------------------------------------------------------------------------
# basic operations


def _vec(A: JordanAlgebra, u, name="u") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (A.dim,):
        raise DimensionError(f"{name} has shape {u.shape}, algebra has dim {A.dim}")
    return u


def multiply(A: JordanAlgebra, u, v) -> np.ndarray:
    u, v = _vec(A, u), _vec(A, v, "v")
    return np.einsum("gab,a,b->g", A.structure, u, v)


def left_mult(A: JordanAlgebra, u) -> np.ndarray:
    """Matrix of v -> u * v."""
    return np.einsum("gab,a->gb", A.structure, _vec(A, u))


def power(A: JordanAlgebra, u, k: int) -> np.ndarray:
    u = _vec(A, u)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        e = find_unit(A)
        if e is None:
            raise ValueError("u^0 requires a unital algebra")
        return e
    L = left_mult(A, u)
    out = u.copy()
    for _ in range(k - 1):
        out = L @ out
    return out


def trace_vector(A: JordanAlgebra) -> np.ndarray:
    """Covector t with tr L_u = t . u."""
    return np.einsum("gag->a", A.structure)


def trace_form(A: JordanAlgebra) -> BilinearForm:
    t = trace_vector(A)
    return BilinearForm(np.einsum("g,gab->ab", t, A.structure))


def find_unit(A: JordanAlgebra, tol_factor: float = DEFAULT.unit_tol_factor) -> Optional[np.ndarray]:
    n = A.dim
    # L_e[g, b] = C[g, a, b] e[a]; stack the n*n equations L_e = I.
    M = A.structure.transpose(0, 2, 1).reshape(n * n, n)
    rhs = np.eye(n).reshape(n * n)
    e, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.linalg.norm(left_mult(A, e) - np.eye(n)) <= tol_factor * n:
        return e
    return None


# --------------------------------------------------------------------------
# residuals


def _sphere(rng, samples, n) -> np.ndarray:
    g = rng.standard_normal((samples, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _prod(C, U, V):
    return np.einsum("gab,sa,sb->sg", C, U, V)


def _polarize(T: np.ndarray, axes: tuple) -> np.ndarray:
    """Symmetrize a tensor over the given group of axes."""
    import itertools

    perms = list(itertools.permutations(axes))
    acc = np.zeros_like(T)
    for p in perms:
        order = list(range(T.ndim))
        for src, dst in zip(axes, p):
            order[src] = dst
        acc += np.transpose(T, order)
    return acc / len(perms)


def jordan_tensor(A: JordanAlgebra) -> np.ndarray:
    """Multilinear Jordan defect, indexed [out, u1, u2, u3, v], symmetric in u's.

    Contracting with (u, u, u, v) gives u*(u^2*v) - u^2*(u*v).
    """
    C = A.structure
    # u1 * ((u2*u3) * v)
    lhs = np.einsum("gap,pqv,qbc->gabcv", C, C, C)
    # (u2*u3) * (u1*v)
    rhs = np.einsum("gqr,qbc,rav->gabcv", C, C, C)
    return _polarize(lhs - rhs, (1, 2, 3))


def jordan_residual(
    A: JordanAlgebra, samples: int = DEFAULT.samples, seed: int = DEFAULT.seed, method: str = "sample"
) -> float:
    """max ||u*(u^2*v) - u^2*(u*v)|| over unit vectors u, v.

    ``method="basis"`` evaluates the polarized identity on all basis tuples
    instead of sampling (the identity is polynomial, so this is exhaustive).
    """
    if method == "basis":
        return float(np.max(np.abs(jordan_tensor(A))))
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    U = _sphere(rng, samples, A.dim)
    V = _sphere(rng, samples, A.dim)
    C = A.structure
    U2 = _prod(C, U, U)
    gap = _prod(C, U, _prod(C, U2, V)) - _prod(C, U2, _prod(C, U, V))
    return float(np.max(np.linalg.norm(gap, axis=1)))


def _K(C, a, b):
    # difference-tensor style contraction K^g_{ab} a^a b^b, written out
    # independently of multiply() so the two residuals share no code path
    return np.einsum("sa,gab,sb->sg", a, C, b)


def integrability_residual(
    A: JordanAlgebra, samples: int = DEFAULT.samples, seed: int = DEFAULT.seed, method: str = "sample"
) -> float:
    """max ||K(K(K(u,u),v),u) - K(K(u,v),K(u,u))|| with K the product."""
    C = A.structure
    if method == "basis":
        # three-term index form: sum over which lower slot carries the lone u
        lhs = np.einsum("eam,mdr,rbc->eabcd", C, C, C)
        lhs = lhs + lhs.transpose(0, 2, 1, 3, 4) + lhs.transpose(0, 3, 2, 1, 4)
        rhs = np.einsum("mad,erm,rbc->eabcd", C, C, C)
        rhs = rhs + rhs.transpose(0, 2, 1, 3, 4) + rhs.transpose(0, 3, 2, 1, 4)
        return float(np.max(np.abs(_polarize(lhs - rhs, (1, 2, 3)))))
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    U = _sphere(rng, samples, A.dim)
    V = _sphere(rng, samples, A.dim)
    uu = _K(C, U, U)
    gap = _K(C, _K(C, uu, V), U) - _K(C, _K(C, U, V), uu)
    return float(np.max(np.linalg.norm(gap, axis=1)))


def _form_matrix(sigma) -> np.ndarray:
    return sigma.matrix if isinstance(sigma, BilinearForm) else np.asarray(sigma, dtype=float)


def invariance_residual(
    A: JordanAlgebra, sigma, samples: int = DEFAULT.samples, seed: int = DEFAULT.seed, method: str = "sample"
) -> float:
    """max |sigma(u, v*w) - sigma(u*v, w)|."""
    S = _form_matrix(sigma)
    C = A.structure
    if S.shape != (A.dim, A.dim):
        raise DimensionError("form and algebra dimensions differ")
    if method == "basis":
        cubic = np.einsum("ag,gbc->abc", S, C)  # sigma(u, v*w)
        return float(np.max(np.abs(cubic - cubic.transpose(2, 0, 1))))
    rng = np.random.default_rng(seed)
    U, V, W = (_sphere(rng, samples, A.dim) for _ in range(3))
    lhs = np.einsum("sa,ab,sb->s", U, S, _prod(C, V, W))
    rhs = np.einsum("sa,ab,sb->s", _prod(C, U, V), S, W)
    return float(np.max(np.abs(lhs - rhs)))


# --------------------------------------------------------------------------
# families


def sym_basis(n: int) -> list:
    """Frobenius-orthonormal basis of n x n symmetric matrices, diagonal first."""
    basis = []
    for i in range(n):
        E = np.zeros((n, n))
        E[i, i] = 1.0
        basis.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0 / math.sqrt(2.0)
            basis.append(E)
    return basis


def sym_to_vec(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError("expected a square matrix")
    if not np.allclose(X, X.T, rtol=0, atol=1e-12 * max(1.0, float(np.max(np.abs(X))))):
        raise ValueError("matrix is not symmetric")
    return np.array([np.sum(B * X) for B in sym_basis(X.shape[0])])


def vec_to_sym(v, n: int) -> np.ndarray:
    return sum(c * B for c, B in zip(np.asarray(v, dtype=float), sym_basis(n)))


def _family_structure(f: Family) -> np.ndarray:
    d = f.dim
    C = np.zeros((d, d, d))
    if f.kind == "componentwise":
        for i in range(d):
            C[i, i, i] = 1.0
    elif f.kind == "spin":
        C[0, 0, 0] = 1.0
        for i in range(1, d):
            C[0, i, i] = 1.0
            C[i, 0, i] = C[i, i, 0] = 1.0
    else:
        B = sym_basis(f.n)
        for a, Ba in enumerate(B):
            for b, Bb in enumerate(B):
                P = 0.5 * (Ba @ Bb + Bb @ Ba)
                for g, Bg in enumerate(B):
                    C[g, a, b] = np.sum(Bg * P)
    return C


def family_algebra(kind: str, n: int) -> JordanAlgebra:
    f = Family(kind, n)
    return JordanAlgebra(_family_structure(f), f)


def componentwise(n: int) -> JordanAlgebra:
    return family_algebra("componentwise", n)


def spin(n: int) -> JordanAlgebra:
    """Spin factor on R^n, u*v = (u0 v0 + <u', v'>, u0 v' + v0 u')."""
    return family_algebra("spin", n)


def sym(n: int) -> JordanAlgebra:
    """Symmetric n x n matrices with X*Y = (XY + YX)/2."""
    return family_algebra("sym", n)


def metrised(A: JordanAlgebra, form=None) -> MetrisedAlgebra:
    """Pair an algebra with a form (default: its trace form)."""
    return MetrisedAlgebra(A, trace_form(A) if form is None else BilinearForm(_form_matrix(form)))


def direct_sum(parts: Sequence[MetrisedAlgebra], weights: Optional[Sequence[float]] = None) -> MetrisedAlgebra:
    """Block-diagonal sum with form sum_j w_j sigma_j."""
    parts = list(parts)
    if not parts:
        raise ValueError("direct_sum needs at least one part")
    weights = [1.0] * len(parts) if weights is None else [float(w) for w in weights]
    if len(weights) != len(parts):
        raise ValueError("one weight per part")
    if any(not w > 0 for w in weights):
        raise ValueError("weights must be positive")
    n = sum(p.dim for p in parts)
    C = np.zeros((n, n, n))
    S = np.zeros((n, n))
    fams = []
    tagged = all(p.algebra.family is not None for p in parts)
    start = 0
    for p, w in zip(parts, weights):
        s = slice(start, start + p.dim)
        C[s, s, s] = p.algebra.structure
        S[s, s] = w * p.sigma
        fams.extend(p.algebra.blocks)
        start += p.dim
    if tagged:
        family = fams[0] if len(fams) == 1 else tuple(fams)
    else:
        family = None
    return MetrisedAlgebra(JordanAlgebra(C, family), BilinearForm(S))


def factor_weights(M: MetrisedAlgebra, rtol: float = 1e-9) -> np.ndarray:
    """Weights w_b with sigma = sum_b w_b tau_b over the simple blocks.

    Raises ValueError if the form is not of that shape.
    """
    A = M.algebra
    if A.family is None:
        raise UnsupportedFamilyError("weight recovery needs a family-tagged algebra")
    S = M.sigma
    tau = trace_form(A).matrix
    mask = np.zeros_like(S, dtype=bool)
    weights = []
    for _, s in A.simple_blocks():
        Sb, Tb = S[s, s], tau[s, s]
        w = float(np.sum(Sb * Tb) / np.sum(Tb * Tb))
        if np.max(np.abs(Sb - w * Tb)) > rtol * max(1.0, float(np.max(np.abs(Sb)))):
            raise ValueError("form is not a multiple of the trace form on a simple block")
        weights.append(w)
        mask[s, s] = True
    if np.max(np.abs(S[~mask]), initial=0.0) > rtol * max(1.0, float(np.max(np.abs(S)))):
        raise ValueError("form couples distinct simple blocks")
    return np.array(weights)


# --------------------------------------------------------------------------
# spectral calculus


def _group(lams, idems, mults, rtol):
    """Merge (numerically) equal eigenvalues, summing idempotents and multiplicities."""
    order = np.argsort(lams, kind="stable")
    lams = np.asarray(lams, dtype=float)[order]
    idems = np.asarray(idems, dtype=float)[order]
    mults = np.asarray(mults, dtype=float)[order]
    scale = float(np.max(np.abs(lams))) if lams.size else 0.0
    tol = rtol * scale
    groups = [[0]]
    for i in range(1, lams.size):
        if lams[i] - lams[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return SpectralDecomposition(
        idempotents=np.array([idems[g].sum(axis=0) for g in groups]),
        eigenvalues=np.array([lams[g].mean() for g in groups]),
        multiplicities=np.array([mults[g].sum() for g in groups]),
    )


def _block_pieces(f: Family, x: np.ndarray):
    """Eigenvalue, local idempotent and multiplicity triples for one family block."""
    if f.kind == "componentwise":
        return [(x[i], np.eye(f.dim)[i], 1.0) for i in range(f.dim)]
    if f.kind == "spin":
        x0, xb = x[0], x[1:]
        r = float(np.linalg.norm(xb))
        unit = np.zeros(f.dim)
        unit[0] = 1.0
        if r == 0.0:
            return [(x0, unit, float(f.n))]
        w = xb / r
        ep = 0.5 * np.concatenate([[1.0], w])
        em = 0.5 * np.concatenate([[1.0], -w])
        return [(x0 + r, ep, f.n / 2.0), (x0 - r, em, f.n / 2.0)]
    X = vec_to_sym(x, f.n)
    lam, Q = np.linalg.eigh(X)
    d = (f.n + 1) / 2.0
    return [(lam[k], sym_to_vec(np.outer(Q[:, k], Q[:, k])), d) for k in range(f.n)]


def block_spectra(A: JordanAlgebra, x, rtol: float = DEFAULT.grouping_rtol) -> list:
    """Per-block decompositions, each in the block's own coordinates."""
    if A.family is None:
        raise UnsupportedFamilyError("spectral calculus needs a family-tagged algebra")
    x = _vec(A, x, "x")
    out = []
    for f, s in A.block_slices():
        pieces = _block_pieces(f, x[s])
        out.append((f, s, _group(*zip(*pieces), rtol=rtol)))
    return out


def spectral(A: JordanAlgebra, x, rtol: float = DEFAULT.grouping_rtol) -> SpectralDecomposition:
    """Decompose x = sum_j lambda_j e^j with d_j = tr L_{e^j}.

    For a single sym(n) block, ``x`` may also be passed as a symmetric matrix.
    """
    if A.family is None:
        raise UnsupportedFamilyError("spectral calculus needs a family-tagged algebra")
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        if len(A.blocks) != 1 or A.blocks[0].kind != "sym":
            raise DimensionError("matrix input only for a sym(n) algebra")
        x = sym_to_vec(x)
    x = _vec(A, x, "x")
    lams, idems, mults = [], [], []
    for f, s in A.block_slices():
        for lam, e_loc, d in _block_pieces(f, x[s]):
            e = np.zeros(A.dim)
            e[s] = e_loc
            lams.append(lam)
            idems.append(e)
            mults.append(d)
    return _group(lams, idems, mults, rtol)


def unit(A: JordanAlgebra) -> np.ndarray:
    """Unit element of a family-tagged algebra (closed form)."""
    if A.family is None:
        e = find_unit(A)
        if e is None:
            raise ValueError("algebra has no unit element")
        return e
    e = np.zeros(A.dim)
    for f, s in A.block_slices():
        if f.kind == "componentwise":
            e[s] = 1.0
        elif f.kind == "spin":
            e[s.start] = 1.0
        else:
            e[s] = sym_to_vec(np.eye(f.n))
    return e


def _is_integral(d) -> bool:
    return abs(d - round(d)) < 1e-12


def determinant(A: JordanAlgebra, x) -> float:
    sd = spectral(A, x)
    out = 1.0
    for lam, d in zip(sd.eigenvalues, sd.multiplicities):
        if lam < 0 and not _is_integral(d):
            raise SpectralDomainError("negative eigenvalue with fractional multiplicity")
        out *= lam ** int(round(d)) if lam < 0 else lam**d
    return float(out)


def logdet(A: JordanAlgebra, x) -> float:
    sd = spectral(A, x)
    if np.any(sd.eigenvalues <= 0):
        raise SpectralDomainError("logdet needs all eigenvalues positive")
    return float(np.sum(sd.multiplicities * np.log(sd.eigenvalues)))


def inverse(A: JordanAlgebra, x) -> np.ndarray:
    sd = spectral(A, x)
    if np.any(sd.eigenvalues == 0):
        raise SpectralDomainError("element is not invertible")
    return sd.apply(lambda l: 1.0 / l)


def spectral_radius(A: JordanAlgebra, x) -> float:
    """Spectral radius of L_x (works for raw structure constants)."""
    return float(np.max(np.abs(np.linalg.eigvals(left_mult(A, x)))))
