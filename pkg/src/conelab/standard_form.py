"""Standard forms ``(K, M, P, rho^{1/2})`` of full matrix algebras and their tensor products.

K is the Hilbert-Schmidt space, M acts on it by left multiplication
(:func:`left_multiply`), and the natural cone P is the image of the PSD
operators under ``A -> rho^{1/4} A rho^{1/4}``. For a faithful ``rho`` in finite
dimension that image is exactly the PSD cone of K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import hs_core as hs
from .errors import InvalidInputError, NotFaithfulError
from .jsonio import matrix_from_json, matrix_to_json

DEFAULT_FLOOR = 1e-9


@dataclass(frozen=True)
class StandardForm:
    rho: np.ndarray
    floor: float = DEFAULT_FLOOR
    rho_quarter: np.ndarray = field(init=False, repr=False)
    rho_half: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = hs.check_density(self.rho)
        low = float(np.linalg.eigvalsh(rho)[0])
        if low < self.floor:
            raise NotFaithfulError(
                f"reference state not faithful: min eigenvalue {low:.3e} < floor {self.floor:.1e}"
            )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_quarter", hs.mat_power(rho, 0.25))
        object.__setattr__(self, "rho_half", hs.mat_power(rho, 0.5))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def to_json(self) -> dict[str, Any]:
        return {"dim": self.dim, "rho": matrix_to_json(self.rho), "floor": self.floor}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "StandardForm":
        rho = matrix_from_json(obj["rho"])
        if rho.shape[0] != obj["dim"]:
            raise InvalidInputError(f"dim {obj['dim']} does not match rho of shape {rho.shape}")
        return cls(rho, float(obj.get("floor", DEFAULT_FLOOR)))


@dataclass(frozen=True)
class CompositeForm:
    left: StandardForm
    right: StandardForm
    rho_half: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rho_half", hs.kron(self.left.rho_half, self.right.rho_half))

    @property
    def dims(self) -> tuple[int, int]:
        return self.left.dim, self.right.dim

    @property
    def dim(self) -> int:
        return self.left.dim * self.right.dim

    @property
    def rho(self) -> np.ndarray:
        return hs.kron(self.left.rho, self.right.rho)


def make_standard_form(rho, floor: float = DEFAULT_FLOOR) -> StandardForm:
    """Standard form built on a faithful reference density ``rho``.

    Raises :class:`NotFaithfulError` when the smallest eigenvalue of ``rho`` is
    below ``floor``.
    """
    return StandardForm(np.asarray(rho, dtype=complex), floor)


def make_composite(sf1: StandardForm, sf2: StandardForm) -> CompositeForm:
    return CompositeForm(sf1, sf2)


def gibbs_state(hamiltonian, beta: float) -> np.ndarray:
    """Thermal state ``exp(-beta H) / Z``.

    The spectrum is shifted by its minimum before exponentiating, so large
    ``beta`` does not underflow the partition function.
    """
    if beta < 0:
        raise InvalidInputError(f"inverse temperature must be >= 0, got {beta}")
    w, v = hs.hermitian_eig(hamiltonian)
    boltzmann = np.exp(-beta * (w - w[0]))
    rho = (v * (boltzmann / boltzmann.sum())) @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def cone_map(sf: StandardForm, a) -> np.ndarray:
    """``rho^{1/4} a rho^{1/4}`` for PSD ``a``; a point of the natural cone."""
    a = hs.check_psd(a)
    if a.shape != sf.rho.shape:
        raise InvalidInputError(f"operator of shape {a.shape} does not act on dimension {sf.dim}")
    return sf.rho_quarter @ a @ sf.rho_quarter


def cone_preimage(sf: StandardForm, w) -> np.ndarray:
    """``rho^{-1/4} w rho^{-1/4}``, the PSD operator that :func:`cone_map` sends to ``w``."""
    inv_quarter = hs.mat_power(sf.rho, -0.25)
    return inv_quarter @ hs.as_square(w) @ inv_quarter


def representative_vector(d) -> np.ndarray:
    """The unique natural-cone vector ``v`` with ``Tr(A d) = (v, A v)`` for all ``A``.

    Concretely the PSD square root of ``d``. ``d`` need not be faithful.
    """
    d = hs.check_density(d)
    return hs.mat_power(d, 0.5)


def left_multiply(a, v) -> np.ndarray:
    """Action of the algebra element ``a`` on the K-vector ``v``."""
    a = hs.as_square(a)
    v = hs.as_operator(v)
    if a.shape[1] != v.shape[0]:
        raise InvalidInputError(f"cannot multiply {a.shape} into {v.shape}")
    return a @ v


def vector_state_expectation(v, a) -> complex:
    """``(v, a v)`` in K."""
    return hs.hs_inner(v, left_multiply(a, v))
