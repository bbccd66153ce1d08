"""Command-line entry point.

Exit codes: 0 success / member, 1 non_member (or failing suite), 2 inconclusive,
3 violated replication claim, 64 malformed input, 65 input that is well-formed
JSON but not the required kind of matrix.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import replace

import numpy as np

from . import hs_core as hs
from .cones import INCONCLUSIVE, MEMBER, ConeParams, in_dual_sep_cone, in_sep_cone, seesaw_min_product
from .correspondence import (
    SeparableDecomposition,
    cone_vector,
    expectation_via_decomposition,
    expectation_via_k_density,
    expectation_via_state,
    experiment_sqrt_membership,
    k_density_from_decomposition,
    rescale_decomposition,
    rescaled_synthesis,
    state_from_decomposition,
    strict_positivity_check,
)
from .errors import InvalidInputError, ReplicationFailure
from .jsonio import dumps, matrix_from_json, matrix_to_json
from .replication import ReplicationParams, run_replication
from .suites import DEFAULT_DIMS, run_suites

EXIT_OK = 0
EXIT_NON_MEMBER = 1
EXIT_INCONCLUSIVE = 2
EXIT_CLAIM_VIOLATED = 3
EXIT_MALFORMED = 64
EXIT_BAD_INPUT = 65

VERDICT_EXIT = {MEMBER: EXIT_OK, "non_member": EXIT_NON_MEMBER, INCONCLUSIVE: EXIT_INCONCLUSIVE}


class InputError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        dims = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like AxB, got {text!r}") from None
    if min(dims) < 1:
        raise argparse.ArgumentTypeError("dims must be >= 1")
    return dims


def _positive_float(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerance must be > 0")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", type=_parse_dims, help="local dimensions as AxB")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=_positive_float)
    common.add_argument("--restarts", type=int, default=64)
    common.add_argument("--iters", type=int, help="see-saw iterations (witness, replicate) or search iterations (separability)")
    common.add_argument("--output", help="write the report here instead of standard output")

    parser = argparse.ArgumentParser(prog="conelab", description="Separable-cone laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("replicate", parents=[common], help="rebuild sigma, theta, eta and check every sign claim")
    rep.add_argument("--d0", type=int, default=2)
    rep.add_argument("--cases", type=int, default=200)

    for name, help_text in [
        ("separability", "decide separability of a density matrix"),
        ("witness", "test whether a Hermitian operator is block-positive"),
        ("correspondence", "run decomposition / cone-vector checks on a decomposition"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("input", nargs="?", default="-", help="JSON file, or - for standard input")
        if name == "correspondence":
            p.add_argument("--cases", type=int, default=10, help="random observable pairs per check")

    suite = sub.add_parser("suite", parents=[common], help="run the randomized property suites")
    suite.add_argument("--cases", type=int, default=100)
    return parser


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(EXIT_MALFORMED, f"cannot read JSON from {path}: {exc}") from exc


def _read_matrix(path: str) -> np.ndarray:
    try:
        return matrix_from_json(_read_json(path))
    except InvalidInputError as exc:
        raise InputError(EXIT_MALFORMED, str(exc)) from exc


def _infer_dims(cfg, n: int) -> tuple[int, int]:
    if cfg.dims is not None:
        if cfg.dims[0] * cfg.dims[1] != n:
            raise InputError(EXIT_BAD_INPUT, f"dims {cfg.dims} do not match a {n}x{n} matrix")
        return cfg.dims
    root = math.isqrt(n)
    if root * root != n:
        raise InputError(EXIT_BAD_INPUT, f"cannot infer dims for size {n}; pass --dims")
    return root, root


def _cone_params(cfg, search_iters: bool = False) -> ConeParams:
    params = ConeParams(seed=cfg.seed, restarts=cfg.restarts)
    if cfg.tol is not None:
        params = replace(params, tol=cfg.tol)
    if cfg.iters is not None:
        key = "decomp_iters" if search_iters else "max_iters"
        params = replace(params, **{key: cfg.iters})
    return params


@contextmanager
def _output(cfg):
    if cfg.output:
        buf = io.StringIO()
        yield buf
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        yield sys.stdout


def cmd_replicate(cfg) -> int:
    params = ReplicationParams(d0=cfg.d0, seed=cfg.seed, restarts=cfg.restarts, cases=cfg.cases)
    if cfg.tol is not None:
        params.tol = cfg.tol
    if cfg.iters is not None:
        params.max_iters = cfg.iters
    try:
        report = run_replication(params)
    except ReplicationFailure as exc:
        with _output(cfg) as out:
            out.write(dumps({"status": "failed", "claim": exc.claim, "value": exc.value}) + "\n")
        return EXIT_CLAIM_VIOLATED
    with _output(cfg) as out:
        out.write(dumps(report.to_json()) + "\n")
    return EXIT_OK


def cmd_separability(cfg) -> int:
    rho = _read_matrix(cfg.input)
    try:
        rho = hs.check_density(rho, tol=1e-10)
    except InvalidInputError as exc:
        raise InputError(EXIT_BAD_INPUT, f"not a density matrix: {exc}") from exc
    dims = _infer_dims(cfg, rho.shape[0])
    params = _cone_params(cfg, search_iters=True)
    # ask for a constructive certificate even where PPT already decides
    params = replace(params, certify_iters=200)
    verdict = in_sep_cone(rho, dims, params)
    with _output(cfg) as out:
        out.write(dumps(verdict.to_json()) + "\n")
    return VERDICT_EXIT[verdict.verdict]


def cmd_witness(cfg) -> int:
    sigma = _read_matrix(cfg.input)
    try:
        sigma = hs.check_hermitian(sigma)
    except InvalidInputError as exc:
        raise InputError(EXIT_BAD_INPUT, f"not a Hermitian matrix: {exc}") from exc
    dims = _infer_dims(cfg, sigma.shape[0])
    params = _cone_params(cfg)
    verdict = in_dual_sep_cone(sigma, dims, params)
    best = seesaw_min_product(
        sigma, dims, restarts=params.restarts, max_iters=params.max_iters, tol=params.tol, seed=params.seed
    )
    payload = verdict.to_json()
    payload["value"] = best.value
    payload["product_pair"] = {"u": matrix_to_json(best.u), "v": matrix_to_json(best.v)}
    with _output(cfg) as out:
        out.write(dumps(payload) + "\n")
    return VERDICT_EXIT[verdict.verdict]


def cmd_correspondence(cfg) -> int:
    try:
        dec = SeparableDecomposition.from_json(_read_json(cfg.input))
        if not dec.normalized:
            raise InvalidInputError("correspondence checks need a normalized decomposition")
    except InvalidInputError as exc:
        raise InputError(EXIT_BAD_INPUT, f"invalid decomposition: {exc}") from exc
    dims = dec.dims
    rng = np.random.default_rng(cfg.seed)
    records = []

    rho = state_from_decomposition(dec)
    rho0 = k_density_from_decomposition(dec)
    worst = 0.0
    for _ in range(cfg.cases):
        a, b = hs.random_hermitian(dims[0], rng), hs.random_hermitian(dims[1], rng)
        e7 = expectation_via_decomposition(dec, a, b)
        e8 = expectation_via_k_density(rho0, a, b)
        es = expectation_via_state(rho, a, b)
        worst = max(worst, abs(e7 - e8), abs(e7 - es))
    records.append({"check": "expectation_agreement", "max_abs_error": worst, "passed": worst <= 1e-10})

    v = cone_vector(dec)
    pairings = strict_positivity_check(dec, v)
    records.append({"check": "strict_positivity", "pairings": pairings, "passed": min(pairings) > 1e-14})

    rescaled = rescale_decomposition([(t.weight, t.x, t.y) for t in dec.terms])
    err = hs.hs_norm(rescaled_synthesis(rescaled, v) - v)
    records.append(
        {"check": "rescaling", "weights": rescaled.weights.tolist(), "resynthesis_error": err, "passed": err <= 1e-12}
    )

    exp = experiment_sqrt_membership(rho, dims, _cone_params(cfg), construction=dec)
    records.append({"check": "sqrt_membership", "recorded": True, "passed": True, **exp})

    with _output(cfg) as out:
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK if all(r["passed"] for r in records) else EXIT_CLAIM_VIOLATED


def cmd_suite(cfg) -> int:
    dims_list = (cfg.dims,) if cfg.dims else DEFAULT_DIMS
    result = run_suites(cases=cfg.cases, seed=cfg.seed, dims_list=dims_list)
    with _output(cfg) as out:
        out.write(dumps(result) + "\n")
    return EXIT_OK if result["all_passed"] else EXIT_NON_MEMBER


COMMANDS = {
    "replicate": cmd_replicate,
    "separability": cmd_separability,
    "witness": cmd_witness,
    "correspondence": cmd_correspondence,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    cfg = build_parser().parse_args(argv)
    try:
        return COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(f"conelab: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
