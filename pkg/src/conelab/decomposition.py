"""Separable decompositions: weighted lists of cone-vector pairs ``(lambda_i, x_i, y_i)``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from . import hs_core as hs
from .errors import InvalidInputError
from .jsonio import matrix_from_json, matrix_to_json

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class Term:
    weight: float
    x: np.ndarray
    y: np.ndarray


class SeparableDecomposition:
    """Terms ``(lambda_i > 0, x_i, y_i)`` with ``x_i``, ``y_i`` nonzero PSD operators.

    When ``normalized`` is true the weights sum to one and every ``x_i``,
    ``y_i`` has unit Hilbert-Schmidt norm, so each ``x_i (x) y_i`` is a unit
    vector of K and ``x_i^2 (x) y_i^2`` is a product state.
    """

    def __init__(self, terms: Iterable, normalized: bool = True, psd_tol: float = 1e-10):
        checked = []
        for raw in terms:
            if isinstance(raw, Term):
                weight, x, y = raw.weight, raw.x, raw.y
            else:
                weight, x, y = raw
            weight = float(np.real(weight))
            if not weight > 0:
                raise InvalidInputError(f"weights must be > 0, got {weight}")
            x = hs.check_psd(x, psd_tol)
            y = hs.check_psd(y, psd_tol)
            if hs.hs_norm(x) == 0 or hs.hs_norm(y) == 0:
                raise InvalidInputError("cone vectors must be nonzero")
            checked.append(Term(weight, x, y))
        if not checked:
            raise InvalidInputError("a decomposition needs at least one term")
        shapes = {(t.x.shape, t.y.shape) for t in checked}
        if len(shapes) != 1:
            raise InvalidInputError(f"terms act on different spaces: {sorted(shapes)}")
        if normalized:
            total = sum(t.weight for t in checked)
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InvalidInputError(f"weights sum to {total!r}, expected 1")
            for t in checked:
                for factor in (t.x, t.y):
                    if abs(hs.hs_norm(factor) - 1.0) > NORMALIZATION_TOL:
                        raise InvalidInputError("normalized decompositions need unit-norm cone vectors")
        self.terms: tuple[Term, ...] = tuple(checked)
        self.normalized = bool(normalized)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self) -> str:
        return f"SeparableDecomposition({len(self)} terms, dims={self.dims}, normalized={self.normalized})"

    @property
    def dims(self) -> tuple[int, int]:
        t = self.terms[0]
        return t.x.shape[0], t.y.shape[0]

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    def to_json(self) -> dict[str, Any]:
        return {
            "normalized": self.normalized,
            "terms": [
                {"lambda": t.weight, "x": matrix_to_json(t.x), "y": matrix_to_json(t.y)} for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: Any) -> "SeparableDecomposition":
        if not isinstance(obj, dict) or "terms" not in obj:
            raise InvalidInputError("decomposition JSON must be an object with a 'terms' list")
        try:
            terms = [(float(t["lambda"]), matrix_from_json(t["x"]), matrix_from_json(t["y"])) for t in obj["terms"]]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed decomposition term: {exc}") from exc
        return cls(terms, normalized=bool(obj.get("normalized", True)))

    @classmethod
    def from_product_vectors(cls, weights, us, vs) -> "SeparableDecomposition":
        """Decomposition into pure product states ``|u><u| (x) |v><v|``."""
        terms = [(w, hs.projector(u), hs.projector(v)) for w, u, v in zip(weights, us, vs)]
        return cls(terms, normalized=True)


def synthesize_state(dec: SeparableDecomposition) -> np.ndarray:
    """``sum_i lambda_i (x_i x_i^*) (x) (y_i y_i^*)``."""
    return sum(t.weight * np.kron(t.x @ t.x.conj().T, t.y @ t.y.conj().T) for t in dec.terms)


def synthesize_cone_vector(dec: SeparableDecomposition) -> np.ndarray:
    """``sum_i lambda_i x_i (x) y_i`` as a vector of K1 (x) K2."""
    return sum(t.weight * np.kron(t.x, t.y) for t in dec.terms)
