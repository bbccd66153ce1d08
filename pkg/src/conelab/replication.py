"""Explicit constructions: the witness sigma, the cone element theta, the state eta,
classical-quantum states, and the run that checks every sign claim about them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from . import hs_core as hs
from .cones import ConeParams, in_dual_sep_cone, in_natural_cone, in_sep_cone, ppt_min_eigenvalue
from .errors import InvalidInputError, ReplicationFailure


def _dyad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b.conj())


def _fg(d0: int) -> tuple[np.ndarray, np.ndarray]:
    if int(d0) < 2:
        raise InvalidInputError(f"need a local dimension of at least 2, got {d0}")
    return hs.basis_vector(d0, 0), hs.basis_vector(d0, 1)


def build_sigma(d0: int = 2) -> np.ndarray:
    """``|f><f| (x) |g><g| + |g><g| (x) |f><f| - |f><g| (x) |f><g| - |g><f| (x) |g><f|``.

    Block-positive but not positive; ``f, g`` are the first two basis vectors
    of a ``d0``-dimensional space.
    """
    f, g = _fg(d0)
    return (
        np.kron(_dyad(f, f), _dyad(g, g))
        + np.kron(_dyad(g, g), _dyad(f, f))
        - np.kron(_dyad(f, g), _dyad(f, g))
        - np.kron(_dyad(g, f), _dyad(g, f))
    )


def build_theta(d0: int = 2) -> np.ndarray:
    """``sum_{a,b in {f,g}} |a><b| (x) |a><b|``, i.e. ``|Omega><Omega|`` with ``Omega = f(x)f + g(x)g``."""
    f, g = _fg(d0)
    return (
        np.kron(_dyad(f, f), _dyad(f, f))
        + np.kron(_dyad(g, f), _dyad(g, f))
        + np.kron(_dyad(f, g), _dyad(f, g))
        + np.kron(_dyad(g, g), _dyad(g, g))
    )


def build_eta(lambda1: complex, lambda2: complex, d1: int = 2, d2: int = 2) -> np.ndarray:
    """Normalized ``lambda1 x(x)y + lambda2 y(x)x`` with ``x = e_1``, ``y = e_2``."""
    if lambda1 == 0 and lambda2 == 0:
        raise InvalidInputError("lambda1 and lambda2 cannot both vanish")
    x1, y1 = _fg(d1)
    x2, y2 = _fg(d2)
    eta = lambda1 * np.kron(x1, y2) + lambda2 * np.kron(y1, x2)
    return eta / np.linalg.norm(eta)


def classical_quantum_state(probs: Sequence[float], blocks: Sequence[np.ndarray], dims=None) -> np.ndarray:
    """``sum_i p_i |i><i| (x) block_i``: the general state when the first algebra is diagonal."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise InvalidInputError("probabilities must be nonnegative and sum to 1")
    if len(blocks) != len(probs):
        raise InvalidInputError(f"{len(probs)} probabilities but {len(blocks)} blocks")
    blocks = [hs.check_density(b, tol=1e-10) for b in blocks]
    d1, d2 = len(probs), blocks[0].shape[0]
    if dims is not None and tuple(dims) != (d1, d2):
        raise InvalidInputError(f"dims {tuple(dims)} do not match ({d1}, {d2})")
    return sum(p * np.kron(hs.projector(hs.basis_vector(d1, i)), b) for i, (p, b) in enumerate(zip(probs, blocks)))


def random_classical_quantum_state(dims, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d1, d2 = dims
    probs = rng.dirichlet(np.ones(d1))
    probs = probs / probs.sum()
    return classical_quantum_state(probs, [hs.random_density(d2, rng) for _ in range(d1)])


def classical_suite(cases: int = 200, dims_list=((2, 2), (2, 3)), seed: int = 0, params: ConeParams | None = None) -> float:
    """Fraction of seeded classical-quantum states reported as separable."""
    params = params or ConeParams()
    rng = np.random.default_rng(seed)
    passed = 0
    for i in range(cases):
        dims = dims_list[i % len(dims_list)]
        state = random_classical_quantum_state(dims, rng)
        passed += in_sep_cone(state, dims, params).is_member
    return passed / cases if cases else 1.0


@dataclass
class ReplicationParams:
    d0: int = 2
    tol: float = 1e-8
    restarts: int = 64
    max_iters: int = 200
    seed: int = 0
    cases: int = 200


@dataclass
class ReplicationReport:
    sigma_min_eig: float
    sigma_theta_pairing: float
    seesaw_min: float
    eta_ppt_min: float
    theta_ppt_min: float
    classical_suite_pass_rate: float

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


def run_replication(params: ReplicationParams | None = None) -> ReplicationReport:
    """Rebuild sigma, theta and eta and check every sign claim made about them.

    Raises :class:`ReplicationFailure` on the first violated claim.
    """
    params = params or ReplicationParams()
    d0 = params.d0
    dims = (d0, d0)
    cone = ConeParams(tol=params.tol, restarts=params.restarts, max_iters=params.max_iters, seed=params.seed)
    sigma = build_sigma(d0)
    theta = build_theta(d0)

    pairing = hs.hs_inner(sigma, theta)
    if abs(pairing.imag) > 1e-12:
        raise ReplicationFailure("pairing is not real", pairing.imag)
    pairing = float(pairing.real)
    if not pairing < 0:
        raise ReplicationFailure("(sigma, theta) < 0", pairing)

    sigma_in_p = in_natural_cone(sigma, params.tol)
    if sigma_in_p.is_member:
        raise ReplicationFailure("sigma is not in the natural cone", sigma_in_p.margin)

    dual = in_dual_sep_cone(sigma, dims, cone)
    if dual.margin < -params.tol or not dual.is_member:
        raise ReplicationFailure("sigma pairs nonnegatively with the separable cone", dual.margin)

    theta_in_p = in_natural_cone(theta, params.tol)
    if not theta_in_p.is_member:
        raise ReplicationFailure("theta is in the natural cone", theta_in_p.margin)
    theta_sep = in_sep_cone(theta, dims, cone)
    if theta_sep.verdict != "non_member":
        raise ReplicationFailure("theta is not separable", theta_sep.margin)

    eta = build_eta(1 / np.sqrt(2), 1 / np.sqrt(2), d0, d0)
    p_eta = hs.projector(eta)
    eta_sep = in_sep_cone(p_eta, dims, cone)
    if eta_sep.verdict != "non_member":
        raise ReplicationFailure("P_eta is not separable", eta_sep.margin)

    rate = classical_suite(params.cases, seed=params.seed, params=cone)
    if rate != 1.0:
        raise ReplicationFailure("every classical-quantum state is separable", rate)

    return ReplicationReport(
        sigma_min_eig=sigma_in_p.margin,
        sigma_theta_pairing=pairing,
        seesaw_min=dual.margin,
        eta_ppt_min=ppt_min_eigenvalue(p_eta, dims),
        theta_ppt_min=ppt_min_eigenvalue(theta, dims),
        classical_suite_pass_rate=rate,
    )
