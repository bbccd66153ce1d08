"""Separable decompositions versus vectors of the separable cone.

A normalized decomposition ``{(lambda_i, x_i, y_i)}`` defines the state
``sum_i lambda_i x_i^2 (x) y_i^2`` on H1 (x) H2 and, one level up, the density
``rho_0 = sum_i lambda_i |x_i (x) y_i><x_i (x) y_i|`` on K. Both give the same
expectations for product observables. Vectors of K1 (x) K2 are stored as
operators on H1 (x) H2 (``x (x) y -> kron(x, y)``), and K itself is flattened
row-major.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from . import hs_core as hs
from .cones import DEFAULT_PARAMS, INCONCLUSIVE, ConeParams, in_sep_cone
from .decomposition import SeparableDecomposition, Term, synthesize_cone_vector, synthesize_state
from .errors import ConsistencyError, InvalidInputError
from .jsonio import matrix_to_json

__all__ = [
    "KDensity",
    "SeparableDecomposition",
    "Term",
    "state_from_decomposition",
    "k_density_from_decomposition",
    "expectation_via_decomposition",
    "expectation_via_k_density",
    "expectation_via_state",
    "cone_vector",
    "strict_positivity_check",
    "rescale_decomposition",
    "rescaled_synthesis",
    "experiment_sqrt_membership",
    "random_decomposition",
    "write_report_lines",
]


@dataclass(frozen=True)
class KDensity:
    """Density operator on K = HS(H1 (x) H2), a ``(d1 d2)^2``-dimensional space."""

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        n = self.dims[0] * self.dims[1]
        if self.matrix.shape != (n * n, n * n):
            raise InvalidInputError(f"K-density of shape {self.matrix.shape} does not match dims {self.dims}")
        hs.check_density(self.matrix)

    @property
    def dim_K(self) -> int:
        return self.matrix.shape[0]


def _require_normalized(dec: SeparableDecomposition) -> None:
    if not dec.normalized:
        raise InvalidInputError("operation needs a normalized decomposition")


def state_from_decomposition(dec: SeparableDecomposition) -> np.ndarray:
    """The separable density matrix ``sum_i lambda_i (x_i x_i^*) (x) (y_i y_i^*)``."""
    _require_normalized(dec)
    rho = synthesize_state(dec)
    return 0.5 * (rho + rho.conj().T)


def k_density_from_decomposition(dec: SeparableDecomposition) -> KDensity:
    """Mixture of the rank-one projectors onto the unit K-vectors ``x_i (x) y_i``.

    The vectors are generally not orthogonal, so the weights are not the
    eigenvalues of the result.
    """
    _require_normalized(dec)
    n = dec.dims[0] * dec.dims[1]
    rho0 = np.zeros((n * n, n * n), dtype=complex)
    for t in dec.terms:
        xy = np.kron(t.x, t.y)
        if abs(hs.hs_norm(xy) - 1.0) > 1e-12:
            raise InvalidInputError("K-level terms must be unit vectors")
        rho0 += t.weight * hs.rank_one(xy, xy)
    return KDensity(0.5 * (rho0 + rho0.conj().T), dec.dims)


def _check_observables(dec: SeparableDecomposition, a, b) -> tuple[np.ndarray, np.ndarray]:
    a = hs.check_hermitian(a)
    b = hs.check_hermitian(b)
    d1, d2 = dec.dims
    if a.shape != (d1, d1) or b.shape != (d2, d2):
        raise InvalidInputError(f"observables {a.shape}, {b.shape} do not act on dims {dec.dims}")
    return a, b


def expectation_via_decomposition(dec: SeparableDecomposition, a, b) -> float:
    """``sum_i lambda_i (x_i, A x_i)(y_i, B y_i)``."""
    a, b = _check_observables(dec, a, b)
    total = sum(t.weight * hs.hs_inner(t.x, a @ t.x) * hs.hs_inner(t.y, b @ t.y) for t in dec.terms)
    return float(np.real(total))


def expectation_via_k_density(rho0: KDensity, a, b) -> float:
    """``Tr(rho_0 L)`` over K, with ``L`` the matrix of ``mu -> (A (x) B) mu``."""
    a = hs.check_hermitian(a)
    b = hs.check_hermitian(b)
    d1, d2 = rho0.dims
    if a.shape != (d1, d1) or b.shape != (d2, d2):
        raise InvalidInputError(f"observables {a.shape}, {b.shape} do not act on dims {rho0.dims}")
    superop = hs.left_multiplication_superop(np.kron(a, b))
    return float(np.real(np.trace(rho0.matrix @ superop)))


def expectation_via_state(rho, a, b) -> float:
    """``Tr(rho (A (x) B))``."""
    return float(np.real(np.trace(np.asarray(rho) @ np.kron(a, b))))


def cone_vector(dec: SeparableDecomposition) -> np.ndarray:
    """``sum_i lambda_i x_i (x) y_i``, a vector of the separable cone."""
    return synthesize_cone_vector(dec)


def strict_positivity_check(dec: SeparableDecomposition, v) -> list[float]:
    """Pairings ``<v, x_i (x) y_i>`` for every term; all are positive for ``v = cone_vector(dec)``.

    Each pairing expands into ``sum_k lambda_k Tr(x_k x_i) Tr(y_k y_i)``, a sum
    of nonnegative terms containing ``lambda_i ||x_i (x) y_i||^2 > 0``.
    """
    v = hs.as_square(v)
    return [float(np.real(hs.hs_inner(v, np.kron(t.x, t.y)))) for t in dec.terms]


def rescale_decomposition(raw_terms: Iterable) -> SeparableDecomposition:
    """Rewrite ``v = sum_i l0_i x_i (x) y_i`` as ``v = sum_i l_i <x_i (x) y_i, v> x_i (x) y_i``.

    Returns the decomposition carrying the new weights
    ``l_i = l0_i / <x_i (x) y_i, v>``. It is not normalized.

    Raises
    ------
    ConsistencyError
        If some pairing is not strictly positive, which cannot happen for
        genuine cone vectors.
    """
    raw = SeparableDecomposition(raw_terms, normalized=False)
    v = synthesize_cone_vector(raw)
    pairings = strict_positivity_check(raw, v)
    terms = []
    for t, pairing in zip(raw.terms, pairings):
        if not pairing > 0:
            raise ConsistencyError(f"non-positive pairing {pairing!r} between a term and its cone vector")
        terms.append((t.weight / pairing, t.x, t.y))
    return SeparableDecomposition(terms, normalized=False)


def rescaled_synthesis(dec: SeparableDecomposition, v) -> np.ndarray:
    """``sum_i l_i <x_i (x) y_i, v> x_i (x) y_i``."""
    v = hs.as_square(v)
    out = np.zeros_like(v)
    for t in dec.terms:
        xy = np.kron(t.x, t.y)
        out = out + t.weight * hs.hs_inner(xy, v) * xy
    return out


def _input_hash(d: np.ndarray) -> str:
    payload = json.dumps(matrix_to_json(d), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()


def experiment_sqrt_membership(
    d_separable,
    dims,
    params: ConeParams = DEFAULT_PARAMS,
    construction: SeparableDecomposition | None = None,
) -> dict[str, Any]:
    """Test whether the cone representative ``sqrt(d)`` of a separable state is itself separable.

    The input must be certified separable, either by ``in_sep_cone`` or by a
    ``construction`` that resynthesizes it. The outcome is recorded, never
    asserted: the returned record holds the input, its hash and the verdict
    on ``sqrt(d)`` with its certificate.
    """
    d = hs.check_density(d_separable, tol=1e-10)
    if construction is not None:
        err = hs.hs_norm(state_from_decomposition(construction) - d)
        if err > 1e-10:
            raise InvalidInputError(f"construction does not reproduce the input (error {err:.3e})")
    else:
        certified = in_sep_cone(d, dims, params)
        if not certified.is_member:
            raise InvalidInputError(f"input is not certified separable (verdict {certified.verdict})")
    root = hs.mat_power(d, 0.5)
    verdict = in_sep_cone(root, dims, params)
    return {
        "input_hash": _input_hash(d),
        "input": matrix_to_json(d),
        "dims": list(dims),
        "representative": matrix_to_json(root),
        "verdict": verdict.verdict,
        "margin": verdict.margin,
        "certificate": verdict.certificate.to_json(),
        "inconclusive": verdict.verdict == INCONCLUSIVE,
    }


def write_report_lines(records: Sequence[dict[str, Any]], stream) -> None:
    """JSON lines, sorted by input hash so batch order does not leak into the output."""
    for rec in sorted(records, key=lambda r: r["input_hash"]):
        stream.write(json.dumps(rec, sort_keys=True) + "\n")


def random_decomposition(dims, n_terms: int, seed=None, pure: bool = False) -> SeparableDecomposition:
    """Random normalized decomposition with Dirichlet weights.

    Cone vectors are Ginibre PSD matrices scaled to unit HS norm, or rank-one
    projectors when ``pure`` is set.
    """
    rng = np.random.default_rng(seed)
    d1, d2 = dims
    weights = rng.dirichlet(np.ones(n_terms))
    weights = weights / weights.sum()
    terms = []
    for w in weights:
        if pure:
            x = hs.projector(hs.random_pure(d1, rng))
            y = hs.projector(hs.random_pure(d2, rng))
        else:
            x = hs.random_psd(d1, rng)
            y = hs.random_psd(d2, rng)
            x, y = x / hs.hs_norm(x), y / hs.hs_norm(y)
        terms.append((w, x, y))
    return SeparableDecomposition(terms, normalized=True)
