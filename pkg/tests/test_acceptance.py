"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import json

import numpy as np
from conftest import record_criterion, werner

from conelab import hs_core as hs
from conelab.cones import (
    INCONCLUSIVE,
    MEMBER,
    NON_MEMBER,
    ConeParams,
    in_natural_cone,
    in_sep_cone,
    ppt_min_eigenvalue,
    seesaw_min_product,
)
from conelab.correspondence import (
    cone_vector,
    expectation_via_decomposition,
    expectation_via_k_density,
    expectation_via_state,
    experiment_sqrt_membership,
    k_density_from_decomposition,
    random_decomposition,
    rescale_decomposition,
    rescaled_synthesis,
    state_from_decomposition,
    strict_positivity_check,
    write_report_lines,
)
from conelab.replication import build_eta, build_sigma, build_theta, classical_suite
from conelab.standard_form import make_standard_form, representative_vector


def _dyadic_pairing():
    # <sigma, theta> = sum over matching dyads; only (ff,gg) and (gg,ff) survive, each -1 * 1
    sigma_terms = {("fg", "fg"): 1, ("gf", "gf"): 1, ("ff", "gg"): -1, ("gg", "ff"): -1}
    theta_terms = {(a, b): 1 for a in ("ff", "gg") for b in ("ff", "gg")}
    return sum(s * theta_terms.get(k, 0) for k, s in sigma_terms.items())


def test_criterion_01_non_self_duality_pairing():
    value = hs.hs_inner(build_sigma(2), build_theta(2))
    expected = _dyadic_pairing()
    ok = expected == -2 and abs(value - expected) <= 1e-10
    record_criterion(1, ok, f"<sigma, theta> = {value.real:+.3e} (oracle {expected})")
    assert ok


def test_criterion_02_sigma_in_dual_cone():
    res = seesaw_min_product(build_sigma(2), (2, 2), restarts=64)
    # closed form of <u(x)v|sigma|u(x)v> = |u_f v_g - u_g v_f|^2 on a grid over both factors
    t = np.linspace(0, np.pi / 2, 31)
    ph = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    t1, p1, t2, p2 = np.meshgrid(t, ph, t, ph, indexing="ij")
    uf, ug = np.cos(t1), np.exp(1j * p1) * np.sin(t1)
    vf, vg = np.cos(t2), np.exp(1j * p2) * np.sin(t2)
    grid = np.min(np.abs(uf * vg - ug * vf) ** 2)
    ok = -1e-8 <= res.value <= 1e-8 and res.grid_value is not None and abs(grid) <= 1e-12
    record_criterion(2, ok, f"see-saw+grid min = {res.value:+.3e}, independent grid {grid:+.3e}")
    assert ok


def test_criterion_03_sigma_not_in_natural_cone():
    v = in_natural_cone(build_sigma(2))
    ok = v.verdict == NON_MEMBER and abs(v.margin + 1) <= 1e-10
    record_criterion(3, ok, f"min eig sigma = {v.margin:+.12f}")
    assert ok


def test_criterion_04_proper_inclusion():
    theta = build_theta(2)
    in_p = in_natural_cone(theta)
    sep = in_sep_cone(theta, (2, 2))
    ppt = ppt_min_eigenvalue(theta, (2, 2))
    ok = (
        in_p.verdict == MEMBER
        and abs(in_p.margin) <= 1e-10
        and sep.verdict == NON_MEMBER
        and abs(ppt + 1) <= 1e-10
    )
    record_criterion(4, ok, f"theta in P (margin {in_p.margin:+.1e}), sep verdict {sep.verdict}, PPT min {ppt:+.12f}")
    assert ok


def test_criterion_05_pure_entanglement():
    p = hs.projector(build_eta(1 / np.sqrt(2), 1 / np.sqrt(2)))
    ppt = ppt_min_eigenvalue(p, (2, 2))
    verdict = in_sep_cone(p, (2, 2)).verdict
    worst = 0.0
    for lam1 in np.linspace(0, 1, 20):
        lam2 = np.sqrt(1 - lam1**2)
        got = ppt_min_eigenvalue(hs.projector(build_eta(lam1, lam2)), (2, 2))
        worst = max(worst, abs(got + abs(lam1 * lam2)))
    ok = abs(ppt + 0.5) <= 1e-10 and verdict == NON_MEMBER and worst <= 1e-9
    record_criterion(5, ok, f"PPT min {ppt:+.12f}, verdict {verdict}, sweep max error {worst:.1e}")
    assert ok


def test_criterion_06_classical_subsystem():
    rate = classical_suite(cases=200, dims_list=((2, 2), (2, 3)), seed=0)
    ok = rate == 1.0
    record_criterion(6, ok, f"classical-quantum pass rate {rate} over 200 states")
    assert ok


def test_criterion_07_correspondence_consistency():
    worst = 0.0
    for dims in ((2, 2), (2, 3)):
        rng = np.random.default_rng([7, *dims])
        for _ in range(100):
            dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
            a, b = hs.random_hermitian(dims[0], rng), hs.random_hermitian(dims[1], rng)
            e_dec = expectation_via_decomposition(dec, a, b)
            e_k = expectation_via_k_density(k_density_from_decomposition(dec), a, b)
            e_state = expectation_via_state(state_from_decomposition(dec), a, b)
            worst = max(worst, abs(e_dec - e_k), abs(e_dec - e_state), abs(e_k - e_state))
    ok = worst <= 1e-10
    record_criterion(7, ok, f"max expectation disagreement {worst:.1e} over 200 triples")
    assert ok


def test_criterion_08_strict_positivity_and_rescaling():
    rng = np.random.default_rng(8)
    min_pairing, worst_resynth = np.inf, 0.0
    for i in range(100):
        dims = ((2, 2), (2, 3))[i % 2]
        dec = random_decomposition(dims, int(rng.integers(1, 9)), rng)
        v = cone_vector(dec)
        min_pairing = min(min_pairing, min(strict_positivity_check(dec, v)))
        raw = [(t.weight * rng.uniform(0.5, 2.0), t.x, t.y) for t in dec.terms]
        w = sum(lam * np.kron(x, y) for lam, x, y in raw)
        worst_resynth = max(worst_resynth, hs.hs_norm(rescaled_synthesis(rescale_decomposition(raw), w) - w))
    ok = min_pairing > 1e-14 and worst_resynth <= 1e-12
    record_criterion(8, ok, f"min pairing {min_pairing:.3e}, max resynthesis error {worst_resynth:.1e}")
    assert ok


def test_criterion_09_representative_round_trip():
    worst_sq, worst_exp = 0.0, 0.0
    for dim in (2, 3, 4):
        rng = np.random.default_rng([9, dim])
        for _ in range(100):
            rho = hs.random_density(dim, rng)
            v = representative_vector(rho)
            a = hs.random_hermitian(dim, rng)
            worst_sq = max(worst_sq, np.linalg.norm(v @ v - rho))
            worst_exp = max(worst_exp, abs(hs.hs_inner(v, a @ v) - np.trace(a @ rho)))
            make_standard_form(rho)
    ok = worst_sq <= 1e-9 and worst_exp <= 1e-10
    record_criterion(9, ok, f"max ||v^2 - D|| {worst_sq:.1e}, max expectation error {worst_exp:.1e}")
    assert ok


def test_criterion_10_werner_sanity():
    quarter = in_sep_cone(werner(0.25), (2, 2))
    half = in_sep_cone(werner(0.5), (2, 2))
    closed_form = (1 - 3 * 0.5) / 4
    ok = quarter.verdict == MEMBER and half.verdict == NON_MEMBER and abs(half.margin - closed_form) <= 1e-10
    record_criterion(10, ok, f"p=1/4 {quarter.verdict}, p=1/2 {half.verdict} margin {half.margin:+.12f}")
    assert ok


def test_criterion_11_sqrt_membership_experiment(tmp_path):
    params = ConeParams()
    records = []
    for seed in range(50):
        rng = np.random.default_rng([11, seed])
        # pure product terms give low-rank states, where the square root can leave the cone
        dec = random_decomposition((2, 2), int(rng.integers(1, 6)), rng, pure=seed % 2 == 0)
        records.append(experiment_sqrt_membership(state_from_decomposition(dec), (2, 2), params, construction=dec))
    report = tmp_path / "sqrt_membership.jsonl"
    with report.open("w") as fh:
        write_report_lines(records, fh)
    lines = [json.loads(x) for x in report.read_text().splitlines()]
    fields = {"input_hash", "input", "dims", "representative", "verdict", "margin", "certificate", "inconclusive"}
    complete = len(lines) == 50 and all(fields <= set(r) for r in lines)
    counts = {k: sum(r["verdict"] == k for r in lines) for k in (MEMBER, NON_MEMBER, INCONCLUSIVE)}
    ok = complete and counts[INCONCLUSIVE] == 0
    record_criterion(
        11,
        ok,
        f"{len(lines)} records, member {counts[MEMBER]}, non_member {counts[NON_MEMBER]}, inconclusive {counts[INCONCLUSIVE]}",
    )
    assert ok
