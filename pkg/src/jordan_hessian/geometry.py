"""Differential-geometric checks on Hessian potentials.

Given a :class:`~jordan_hessian.potential.PotentialField`, this module reads
off the difference tensor ``K = -1/2 F''' (F'')^{-1}``, evaluates the residuals
of the parallel-third-derivative and parallel-first-derivative equations,
recovers unit, center and homogeneity parameter, reconstructs the metrised
algebra at a point, and integrates parallel transport along polylines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import algebra as alg
from .config import DEFAULT, VerificationConfig
from .errors import DegenerateHessianError, DomainError, ReconstructionError
from .potential import PotentialField


@dataclass(frozen=True, eq=False)
class TensorSample:
    point: np.ndarray
    grad: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    T3: np.ndarray
    T4: Optional[np.ndarray]
    source: dict

    @property
    def dim(self) -> int:
        return self.point.size


@dataclass(frozen=True, eq=False)
class DifferenceTensor:
    K: np.ndarray  # K[g, a, b]

    def __call__(self, u, v) -> np.ndarray:
        return np.einsum("gab,a,b->g", self.K, u, v)


def _check_metric(g: np.ndarray, tol: float) -> np.ndarray:
    # relative spectral gap, so the test does not sharpen with dimension
    mags = np.abs(np.linalg.eigvalsh(0.5 * (g + g.T)))
    if mags.max() == 0.0 or mags.min() < tol * mags.max():
        raise DegenerateHessianError("Hessian is degenerate")
    return np.linalg.inv(g)


def sample_tensors(P: PotentialField, x, cfg: VerificationConfig = DEFAULT, fourth: bool = True) -> TensorSample:
    """Collect F', F'', (F'')^{-1}, F''' and optionally F'''' at x."""
    x = np.asarray(x, dtype=float).ravel()
    if not P.in_domain(x):
        raise DomainError(f"point {x} outside domain")
    g = P.hessian(x)
    g_inv = _check_metric(g, cfg.degenerate_tol)
    orders = (1, 2, 3, 4) if fourth else (1, 2, 3)
    return TensorSample(
        point=x,
        grad=P.gradient(x),
        g=g,
        g_inv=g_inv,
        T3=P.third(x),
        T4=P.fourth(x) if fourth else None,
        source={k: P.source_tag(k) for k in orders},
    )


def difference_tensor(s: TensorSample) -> DifferenceTensor:
    return DifferenceTensor(-0.5 * np.einsum("abd,gd->gab", s.T3, s.g_inv))


def _third_gap(s: TensorSample) -> np.ndarray:
    T3, Gi = s.T3, s.g_inv
    W = np.einsum("abr,rs->abs", T3, Gi)  # T3 with last index raised
    rhs = 0.5 * (
        np.einsum("abr,cdr->abcd", W, T3)
        + np.einsum("acr,bdr->abcd", W, T3)
        + np.einsum("adr,bcr->abcd", W, T3)
    )
    return s.T4 - rhs


def third_parallel_report(s: TensorSample) -> dict:
    raw = float(np.max(np.abs(_third_gap(s))))
    return {"raw": raw, "normalized": raw / (1.0 + float(np.max(np.abs(s.T4))))}


def first_parallel_report(s: TensorSample) -> dict:
    e_up = s.g_inv @ s.grad  # F^{,gd} F_{,d}
    lhs = np.einsum("g,abg->ab", e_up, s.T3)
    raw = float(np.max(np.abs(lhs - 2.0 * s.g)))
    return {"raw": raw, "normalized": raw / float(np.max(np.abs(s.g)))}


def residual_third_parallel(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> float:
    """Normalized max-norm residual of the fourth-order PDE at x."""
    return third_parallel_report(sample_tensors(P, x, cfg))["normalized"]


def residual_first_parallel(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> float:
    """Normalized residual of F_{,d} F^{,gd} F_{,abg} = 2 F_{,ab} at x."""
    return first_parallel_report(sample_tensors(P, x, cfg, fourth=False))["normalized"]


def recover_unit(s: TensorSample) -> np.ndarray:
    return -(s.g_inv @ s.grad)


def recover_center(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> np.ndarray:
    s = sample_tensors(P, x, cfg, fourth=False)
    return s.point - recover_unit(s)


def recover_nu(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> float:
    s = sample_tensors(P, x, cfg, fourth=False)
    return float(s.grad @ recover_unit(s))


def algebra_from_sample(s: TensorSample) -> alg.MetrisedAlgebra:
    """Metrised algebra (K, g) at the sample point, without the PDE gate."""
    K = difference_tensor(s).K
    A = alg.JordanAlgebra(0.5 * (K + K.transpose(0, 2, 1)))
    return alg.MetrisedAlgebra(A, alg.BilinearForm(s.g), check=False)


def reconstruct_algebra(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> alg.MetrisedAlgebra:
    """Read off the metrised algebra at x; refuses if the PDE residual is large."""
    s = sample_tensors(P, x, cfg)
    res = third_parallel_report(s)["normalized"]
    if res > cfg.reconstruct_gate:
        raise ReconstructionError(
            f"third-derivative residual {res:.3e} exceeds gate {cfg.reconstruct_gate:.1e}"
        )
    return algebra_from_sample(s)


def christoffel(P: PotentialField, x) -> np.ndarray:
    """Gamma[g, a, b] = 1/2 F_{,abd} F^{,gd}."""
    x = np.asarray(x, dtype=float)
    g = P.hessian(x)
    return 0.5 * np.einsum("abd,gd->gab", P.third(x), np.linalg.inv(g))


def parallel_transport(P: PotentialField, path: Sequence, steps: int = DEFAULT.transport_steps) -> np.ndarray:
    """Transport matrix J along a polyline, u' = -Gamma(x', u), fixed-step RK4."""
    pts = [np.asarray(p, dtype=float).ravel() for p in path]
    n = P.dim
    J = np.eye(n)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    for p0, p1 in zip(pts[:-1], pts[1:]):
        d = p1 - p0
        if not np.any(d):
            continue
        h = 1.0 / steps

        def rhs(t, M):
            xt = p0 + t * d
            if not P.in_domain(xt):
                raise DomainError(f"path leaves the domain at {xt}")
            G = np.einsum("gab,a->gb", christoffel(P, xt), d)
            return -G @ M

        for k in range(steps):
            t = k * h
            k1 = rhs(t, J)
            k2 = rhs(t + h / 2, J + h / 2 * k1)
            k3 = rhs(t + h / 2, J + h / 2 * k2)
            k4 = rhs(t + h, J + h * k3)
            J = J + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return J


def isomorphism_residual(J, M1: alg.MetrisedAlgebra, M2: alg.MetrisedAlgebra,
                         samples: int = DEFAULT.samples, seed: int = DEFAULT.seed) -> float:
    """max ||J(u*v) - (Ju)*(Jv)|| + |sigma2(Ju, Jv) - sigma1(u, v)| over unit u, v."""
    J = np.asarray(J, dtype=float)
    if J.shape != (M1.dim, M2.dim) or M1.dim != M2.dim:
        raise alg.DimensionError("dimension mismatch")
    rng = np.random.default_rng(seed)
    U = alg._sphere(rng, samples, M1.dim)
    V = alg._sphere(rng, samples, M1.dim)
    C1, C2 = M1.algebra.structure, M2.algebra.structure
    JU, JV = U @ J.T, V @ J.T
    prod_gap = alg._prod(C1, U, V) @ J.T - alg._prod(C2, JU, JV)
    form_gap = np.einsum("sa,ab,sb->s", JU, M2.sigma, JV) - np.einsum("sa,ab,sb->s", U, M1.sigma, V)
    return float(np.max(np.linalg.norm(prod_gap, axis=1) + np.abs(form_gap)))


def metric_preservation(P: PotentialField, J, start, end) -> float:
    J = np.asarray(J, dtype=float)
    return float(np.max(np.abs(J.T @ P.hessian(end) @ J - P.hessian(start))))


def unit_residual(M: alg.MetrisedAlgebra, e) -> float:
    return float(np.max(np.abs(alg.left_mult(M.algebra, e) - np.eye(M.dim))))


def verify_point(P: PotentialField, x, cfg: VerificationConfig = DEFAULT) -> dict:
    """All pointwise checks for one point, as a JSON-ready record."""
    s = sample_tensors(P, x, cfg)
    third = third_parallel_report(s)
    first = first_parallel_report(s)
    rec = {
        "point": s.point.tolist(),
        "residual_third": third["normalized"],
        "residual_third_raw": third["raw"],
        "residual_first": first["normalized"],
        "residual_first_raw": first["raw"],
        "source_tags": {str(k): v for k, v in s.source.items()},
    }
    if first["normalized"] <= cfg.tol_first:
        e = recover_unit(s)
        rec["unit"] = e.tolist()
        rec["center"] = (s.point - e).tolist()
        rec["nu"] = float(s.grad @ e)
    else:
        rec["unit"] = rec["center"] = rec["nu"] = None
    return rec
