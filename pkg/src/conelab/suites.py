"""Seeded randomized property suites, one group per module.

Every check draws from its own generator derived from ``(seed, check index)``
so tallies are reproducible and independent of which checks run.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import hs_core as hs
from .cones import ConeParams, certificate_margin, in_sep_cone, seesaw_min_product
from .correspondence import (
    cone_vector,
    expectation_via_decomposition,
    expectation_via_k_density,
    expectation_via_state,
    k_density_from_decomposition,
    random_decomposition,
    rescale_decomposition,
    rescaled_synthesis,
    state_from_decomposition,
    strict_positivity_check,
)
from .replication import build_eta, random_classical_quantum_state
from .standard_form import gibbs_state, make_composite, make_standard_form, representative_vector

DEFAULT_DIMS = ((2, 2), (2, 3))

Check = Callable[[np.random.Generator, tuple[int, int]], bool]


def _hs_inner_positive(rng, dims):
    a = hs.random_psd(dims[0] * dims[1], rng) - hs.random_psd(dims[0] * dims[1], rng) * 1j
    val = hs.hs_inner(a, a)
    return val.real > 0 and abs(val.imag) <= 1e-12 * val.real


def _kron_factorization(rng, dims):
    d1, d2 = dims
    a, c = hs.random_hermitian(d1, rng), hs.random_psd(d1, rng)
    b, d = hs.random_psd(d2, rng), hs.random_hermitian(d2, rng)
    lhs = hs.hs_inner(hs.kron(a, b), hs.kron(c, d))
    rhs = hs.hs_inner(a, c) * hs.hs_inner(b, d)
    return abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


def _mat_power_roundtrip(rng, dims):
    a = hs.random_psd(dims[0] * dims[1], rng)
    half = hs.mat_power(a, 0.5)
    quarter = hs.mat_power(a, 0.25)
    scale = np.linalg.norm(a)
    return (
        np.linalg.norm(half @ half - a) <= 1e-9 * scale
        and np.linalg.norm(np.linalg.matrix_power(quarter, 4) - a) <= 1e-9 * scale
    )


def _partial_transpose_involution(rng, dims):
    a = hs.random_hermitian(dims[0] * dims[1], rng)
    once = hs.partial_transpose(a, dims, 2)
    return np.array_equal(hs.partial_transpose(once, dims, 2), a) and hs.is_hermitian(once, 1e-14)


def _partial_trace_factorization(rng, dims):
    a, b = hs.random_density(dims[0], rng), hs.random_density(dims[1], rng)
    ab = np.kron(a, b)
    return (
        np.max(np.abs(hs.partial_trace(ab, dims, 1) - a)) <= 1e-12
        and np.max(np.abs(hs.partial_trace(ab, dims, 2) - b)) <= 1e-12
    )


def _expectation_identity(rng, dims):
    for d in (2, 3, 4):
        rho = hs.random_density(d, rng)
        a = hs.random_hermitian(d, rng)
        v = representative_vector(rho)
        if abs(hs.hs_inner(v, a @ v) - np.trace(a @ rho)) > 1e-10:
            return False
    return True


def _composite_consistency(rng, dims):
    sf1 = make_standard_form(hs.random_density(dims[0], rng))
    sf2 = make_standard_form(hs.random_density(dims[1], rng))
    joint = make_standard_form(np.kron(sf1.rho, sf2.rho))
    return np.max(np.abs(make_composite(sf1, sf2).rho_half - joint.rho_half)) <= 1e-10


def _gibbs_faithful(rng, dims):
    # beta * spread <= 20 keeps exp(-beta * spread) / d above the 1e-9 floor
    d = dims[0] * dims[1]
    beta = rng.uniform(0, 50)
    h = hs.random_hermitian(d, rng)
    w = np.linalg.eigvalsh(h)
    spread = min(20.0, 20.0 / beta if beta > 0 else 20.0) * rng.uniform(0.1, 1.0)
    h = h * (spread / (w[-1] - w[0]))
    rho = gibbs_state(h, beta)
    try:
        make_standard_form(rho)
    except ValueError:
        return False
    return True


def _self_duality(rng, dims):
    n = dims[0] * dims[1]
    v, w = hs.random_density(n, rng), hs.random_density(n, rng)
    if hs.hs_inner(v, w).real < -1e-12:
        return False
    h = hs.random_hermitian(n, rng)
    vals, vecs = np.linalg.eigh(h)
    if vals[0] >= 0:
        return True
    neg = vecs[:, vals < 0]
    return hs.hs_inner(h, neg @ neg.conj().T).real < 0


def _dual_pairing(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 6)), rng)
    state = state_from_decomposition(dec)
    if not in_sep_cone(state, dims).is_member:
        return False
    x, y = hs.random_psd(dims[0], rng), hs.random_psd(dims[1], rng)
    return hs.hs_inner(state, np.kron(x, y)).real >= -1e-10


def _certificate_checkable(rng, dims):
    rho = hs.random_density(dims[0] * dims[1], rng)
    verdict = in_sep_cone(rho, dims)
    return abs(certificate_margin(rho, verdict.certificate, dims) - verdict.margin) <= 1e-8


def _seesaw_monotone(rng, dims):
    h = hs.random_hermitian(dims[0] * dims[1], rng)
    res = seesaw_min_product(h, dims, restarts=1, seed=rng, grid_resolution=None)
    steps = np.diff(res.history)
    return bool(np.all(steps <= 1e-10 * (1 + np.abs(res.history[:-1])))) if len(steps) else True


def _expectation_consistency(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
    a, b = hs.random_hermitian(dims[0], rng), hs.random_hermitian(dims[1], rng)
    e7 = expectation_via_decomposition(dec, a, b)
    e8 = expectation_via_k_density(k_density_from_decomposition(dec), a, b)
    es = expectation_via_state(state_from_decomposition(dec), a, b)
    return abs(e7 - e8) <= 1e-10 and abs(e7 - es) <= 1e-10


def _strict_positivity(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
    return min(strict_positivity_check(dec, cone_vector(dec))) > 1e-14


def _rescaling_exact(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
    raw = [(t.weight * rng.uniform(0.5, 2.0), t.x, t.y) for t in dec.terms]
    v = sum(w * np.kron(x, y) for w, x, y in raw)
    return hs.hs_norm(rescaled_synthesis(rescale_decomposition(raw), v) - v) <= 1e-12


def _k_density_valid(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
    m = k_density_from_decomposition(dec).matrix
    return np.linalg.eigvalsh(m)[0] >= -1e-12 and abs(np.trace(m) - 1) <= 1e-12


def _decomposition_separable(rng, dims):
    dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
    return in_sep_cone(state_from_decomposition(dec), dims).is_member


def _classical_quantum(rng, dims):
    return in_sep_cone(random_classical_quantum_state(dims, rng), dims).is_member


def _eta_sweep(rng, dims):
    lam1 = rng.uniform(0, 1)
    lam2 = np.sqrt(1 - lam1**2)
    pt = hs.partial_transpose(hs.projector(build_eta(lam1, lam2)), (2, 2))
    return abs(np.linalg.eigvalsh(pt)[0] + lam1 * lam2) <= 1e-9


SUITES: dict[str, dict[str, Check]] = {
    "hs_core": {
        "hs_inner_positive": _hs_inner_positive,
        "kron_factorization": _kron_factorization,
        "mat_power_roundtrip": _mat_power_roundtrip,
        "partial_transpose_involution": _partial_transpose_involution,
        "partial_trace_factorization": _partial_trace_factorization,
    },
    "standard_form": {
        "expectation_identity": _expectation_identity,
        "composite_consistency": _composite_consistency,
        "gibbs_faithful": _gibbs_faithful,
    },
    "cones": {
        "self_duality": _self_duality,
        "dual_pairing": _dual_pairing,
        "certificate_checkable": _certificate_checkable,
        "seesaw_monotone": _seesaw_monotone,
    },
    "correspondence": {
        "expectation_consistency": _expectation_consistency,
        "strict_positivity": _strict_positivity,
        "rescaling_exact": _rescaling_exact,
        "k_density_valid": _k_density_valid,
        "decomposition_separable": _decomposition_separable,
    },
    "replication": {
        "classical_quantum": _classical_quantum,
        "eta_sweep": _eta_sweep,
    },
}


def run_suites(cases: int = 100, seed: int = 0, dims_list=DEFAULT_DIMS) -> dict:
    """Run every check ``cases`` times, cycling through ``dims_list``."""
    tallies: dict[str, dict[str, dict[str, int]]] = {}
    for group_index, (group, checks) in enumerate(SUITES.items()):
        tallies[group] = {}
        for check_index, (name, check) in enumerate(checks.items()):
            rng = np.random.default_rng([seed, group_index, check_index])
            passed = sum(bool(check(rng, dims_list[i % len(dims_list)])) for i in range(cases))
            tallies[group][name] = {"passed": passed, "total": cases}
    all_passed = all(t["passed"] == t["total"] for g in tallies.values() for t in g.values())
    return {"seed": seed, "cases": cases, "dims": [list(d) for d in dims_list], "suites": tallies, "all_passed": all_passed}
