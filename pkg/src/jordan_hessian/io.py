"""JSON documents for algebras, potentials and reports.

Algebra document (one of)::

    {"family": {"kind": "sym" | "spin" | "componentwise", "n": 3}}
    {"structure": [[[...]]]}                       # C[g][a][b]
    {"factors": [<algebra doc>, ...], "weights": [1, 2]}

each optionally with ``"form": [[...]]``. Without a form the trace form is
used (or none at all, if the trace form is degenerate).

Potential document (one of)::

    {"kind": "barrier", "factors": [{"algebra": <doc>, "weight": 1.0}],
     "center": [...], "offset": 0.0}
    {"kind": "series", "algebra": <doc>}
    {"kind": "quadratic", "matrix": [[...]]}

A bare algebra document is read as a series potential; a document whose
factors carry ``"algebra"`` keys is read as a barrier.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import algebra as alg
from . import potential as pot
from .errors import DegenerateFormError, JordanHessianError


class SpecError(JordanHessianError, ValueError):
    """Malformed input document."""


def load_json(src):
    """Parse a JSON literal or read a JSON file."""
    if isinstance(src, (dict, list)):
        return src
    text = str(src)
    p = Path(text)
    try:
        if p.exists():
            return json.loads(p.read_text())
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON in {text[:60]!r}: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _matrix(obj, name, ndim):
    try:
        a = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{name} is not numeric") from exc
    if a.ndim != ndim:
        raise SpecError(f"{name} must have {ndim} axes, got {a.ndim}")
    return a


def algebra_from_doc(doc) -> tuple:
    """Return (JordanAlgebra, form matrix or None) exactly as the document states."""
    doc = load_json(doc)
    if not isinstance(doc, dict):
        raise SpecError("algebra document must be an object")
    try:
        if "family" in doc:
            fam = doc["family"]
            A = alg.family_algebra(str(fam["kind"]), int(fam["n"]))
            form = None
        elif "structure" in doc:
            A = alg.JordanAlgebra(_matrix(doc["structure"], "structure", 3))
            form = None
        elif "factors" in doc:
            parts = [metrised_from_doc(f) for f in doc["factors"]]
            M = alg.direct_sum(parts, doc.get("weights"))
            A, form = M.algebra, M.sigma
        else:
            raise SpecError("algebra document needs 'family', 'structure' or 'factors'")
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed algebra document: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from exc
    if "form" in doc:
        form = _matrix(doc["form"], "form", 2)
        if form.shape != (A.dim, A.dim):
            raise SpecError(f"form must be {A.dim}x{A.dim}")
    return A, form


def metrised_from_doc(doc) -> alg.MetrisedAlgebra:
    A, form = algebra_from_doc(doc)
    try:
        return alg.metrised(A, form)
    except DegenerateFormError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def algebra_to_doc(M) -> dict:
    A = M.algebra if isinstance(M, alg.MetrisedAlgebra) else M
    if isinstance(A.family, alg.Family):
        doc = {"family": {"kind": A.family.kind, "n": A.family.n}}
    elif A.family is not None:
        doc = {"factors": [{"family": {"kind": f.kind, "n": f.n}} for f in A.blocks]}
    else:
        doc = {"structure": A.structure.tolist()}
    if isinstance(M, alg.MetrisedAlgebra):
        doc["form"] = M.sigma.tolist()
    return doc


def _is_barrier(doc) -> bool:
    if doc.get("kind") == "barrier":
        return True
    f = doc.get("factors")
    return "kind" not in doc and isinstance(f, list) and bool(f) and isinstance(f[0], dict) and "algebra" in f[0]


def barrier_from_doc(doc) -> pot.BarrierSpec:
    doc = load_json(doc)
    try:
        factors = [(metrised_from_doc(f["algebra"]), float(f.get("weight", 1.0))) for f in doc["factors"]]
        center = doc.get("center")
        return pot.barrier_spec(factors, None if center is None else _matrix(center, "center", 1),
                                float(doc.get("offset", 0.0)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed barrier document: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from exc


def barrier_to_doc(spec: pot.BarrierSpec) -> dict:
    return {
        "kind": "barrier",
        "factors": [{"algebra": algebra_to_doc(m), "weight": w} for m, w in spec.factors],
        "center": spec.center.tolist(),
        "offset": spec.offset,
    }


def potential_from_doc(doc) -> pot.PotentialField:
    doc = load_json(doc)
    if not isinstance(doc, dict):
        raise SpecError("potential document must be an object")
    if _is_barrier(doc):
        return pot.canonical_barrier(barrier_from_doc(doc))
    kind = doc.get("kind", "series")
    if kind == "series":
        M = metrised_from_doc(doc.get("algebra", doc))
        try:
            return pot.series_field(M)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    if kind == "quadratic":
        Q = _matrix(doc.get("matrix"), "matrix", 2)
        if Q.shape[0] != Q.shape[1]:
            raise SpecError("quadratic matrix must be square")
        return pot.quadratic_field(Q)
    raise SpecError(f"unknown potential kind {kind!r}")
