"""Membership tests for the natural cone P, the separable cone P1 (x) P2 and its dual.

Verdicts carry a certificate that can be re-evaluated independently with
:func:`certificate_margin`. Membership tests work on scale-normalized copies
of their input (trace for cone elements, Hilbert-Schmidt norm for witnesses)
and report margins in the units of the original input.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np
from scipy.optimize import nnls

from . import hs_core as hs
from .decomposition import SeparableDecomposition, synthesize_state
from .errors import ConsistencyError, InvalidInputError
from .jsonio import matrix_to_json

MEMBER = "member"
NON_MEMBER = "non_member"
INCONCLUSIVE = "inconclusive"

# PPT is necessary and sufficient for separability on these local dimensions.
DECISIVE_DIMS = frozenset({(2, 2), (2, 3), (3, 2)})
# Largest local dimension for which the product-vector grid is exhaustive enough to run.
GRID_MAX_DIM = 3
# Decomposition search gives up after this many iterations without a STAGNATION_GAIN relative improvement.
STAGNATION_WINDOW = 100
STAGNATION_GAIN = 1e-3


@dataclass(frozen=True)
class WitnessCertificate:
    """Evidence behind a verdict.

    ``kind`` is one of ``eigen``, ``product_pair``, ``decomposition``, ``ppt``
    or ``hermiticity``; only the fields for that kind are set.
    """

    kind: str
    value: float
    eigenvector: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    decomposition: Optional[SeparableDecomposition] = None
    scale: float = 1.0

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "value": self.value}
        if self.kind == "eigen":
            out["eigenvalue"] = self.value
            out["eigenvector"] = matrix_to_json(self.eigenvector)
        elif self.kind == "product_pair":
            out["u"] = matrix_to_json(self.u)
            out["v"] = matrix_to_json(self.v)
        elif self.kind == "decomposition":
            out["scale"] = self.scale
            out["decomposition"] = self.decomposition.to_json()
        return out


@dataclass(frozen=True)
class ConeVerdict:
    verdict: str
    margin: float
    certificate: WitnessCertificate

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER

    def to_json(self) -> dict[str, Any]:
        return {"verdict": self.verdict, "margin": self.margin, "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class ConeParams:
    """Tuning knobs shared by the separable-cone and dual-cone tests."""

    tol: float = 1e-9
    restarts: int = 64
    max_iters: int = 200
    seed: int = 0
    grid_resolution: int = 24
    decomp_k: Optional[int] = None
    decomp_iters: int = 2000
    decomp_tol: float = 1e-9
    # Search budget spent on a constructive certificate where PPT already decides.
    certify_iters: int = 0
    workers: Optional[int] = None


DEFAULT_PARAMS = ConeParams()


def _workers(params: ConeParams) -> int:
    if params.workers is not None:
        return max(0, int(params.workers))
    try:
        return max(0, int(os.environ.get("CONELAB_THREADS", "0")))
    except ValueError:
        return 0


def _dims(dims) -> tuple[int, int]:
    d1, d2 = (int(d) for d in dims)
    if d1 < 1 or d2 < 1:
        raise InvalidInputError(f"invalid dims {dims}")
    return d1, d2


def _trace_scale(v: np.ndarray) -> float:
    tr = float(np.trace(v).real)
    if tr > 0:
        return tr
    norm = hs.hs_norm(v)
    return norm if norm > 0 else 1.0


def _norm_scale(v: np.ndarray) -> float:
    norm = hs.hs_norm(v)
    return norm if norm > 0 else 1.0


def product_expectation(sigma, u, v) -> float:
    """``<u (x) v| sigma |u (x) v>`` (real part)."""
    w = np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))
    return float(np.vdot(w, np.asarray(sigma) @ w).real)


# --------------------------------------------------------------------------- natural cone


def in_natural_cone(v, tol: float = 1e-9) -> ConeVerdict:
    """Membership in the natural cone: Hermitian and positive semidefinite.

    The margin is the minimal eigenvalue; the certificate is the minimal
    eigenpair (or the Hermiticity defect when ``v`` is not Hermitian).
    """
    v = hs.as_square(v)
    scale = _trace_scale(v)
    w = v / scale
    defect = hs.hermiticity_defect(w)
    if defect > tol:
        margin = -defect * scale
        return ConeVerdict(NON_MEMBER, margin, WitnessCertificate("hermiticity", margin))
    low, vec = hs.canonical_min_eigvec(w)
    margin = low * scale
    cert = WitnessCertificate("eigen", margin, eigenvector=vec)
    return ConeVerdict(MEMBER if low >= -tol else NON_MEMBER, margin, cert)


def ppt_min_eigenvalue(d, dims) -> float:
    """Smallest eigenvalue of the partial transpose (second factor) of a PSD ``d``."""
    d = hs.check_psd(d)
    pt = hs.partial_transpose(d, _dims(dims), side=2)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


# --------------------------------------------------------------------------- see-saw


@dataclass
class SeesawResult:
    """Best product pair found; ``value`` is re-evaluated at ``(u, v)``."""

    value: float
    u: np.ndarray
    v: np.ndarray
    history: list[float] = field(default_factory=list)
    grid_value: Optional[float] = None
    restart_index: int = -1


def _contract_first(s4: np.ndarray, v: np.ndarray) -> np.ndarray:
    # (1 (x) v)^* sigma (1 (x) v), a d1 x d1 matrix
    return np.einsum("j,ajbl,l->ab", v.conj(), s4, v)


def _contract_second(s4: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.einsum("a,ajbl,b->jl", u.conj(), s4, u)


def _seesaw_run(sigma: np.ndarray, s4: np.ndarray, v0: np.ndarray, max_iters: int, tol: float) -> SeesawResult:
    v = v0
    history: list[float] = []
    value = np.inf
    u = None
    for _ in range(max(1, max_iters)):
        _, u = hs.canonical_min_eigvec(_contract_first(s4, v))
        new_value, v = hs.canonical_min_eigvec(_contract_second(s4, u))
        if history and new_value > history[-1] + 1e-10 * (1.0 + abs(history[-1])):
            raise ConsistencyError(f"see-saw objective increased from {history[-1]!r} to {new_value!r}")
        history.append(new_value)
        if value - new_value < tol:
            value = new_value
            break
        value = new_value
    return SeesawResult(product_expectation(sigma, u, v), u, v, history)


def _unit_grid(dim: int, resolution: int) -> np.ndarray:
    """Unit vectors of C^dim (up to global phase) on a hyperspherical angle grid."""
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    amp_angles = np.linspace(0.0, np.pi / 2, resolution)
    phases = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    if dim == 2:
        t, p = np.meshgrid(amp_angles, phases, indexing="ij")
        t, p = t.ravel(), p.ravel()
        return np.stack([np.cos(t), np.exp(1j * p) * np.sin(t)], axis=1)
    if dim == 3:
        t1, t2, p1, p2 = (a.ravel() for a in np.meshgrid(amp_angles, amp_angles, phases, phases, indexing="ij"))
        return np.stack(
            [np.cos(t1), np.exp(1j * p1) * np.sin(t1) * np.cos(t2), np.exp(1j * p2) * np.sin(t1) * np.sin(t2)],
            axis=1,
        )
    raise InvalidInputError(f"no product grid for local dimension {dim}")


def grid_min_product(sigma, dims, resolution: int = 24) -> tuple[float, np.ndarray, np.ndarray]:
    """Upper bound on the product-vector minimum by exhaustive grid over one factor.

    The gridded factor is the smaller one; the other factor is optimized
    exactly by a minimal eigenvector for every grid point.
    """
    d1, d2 = _dims(dims)
    sigma = hs.as_square(sigma)
    s4 = sigma.reshape(d1, d2, d1, d2)
    if d1 <= d2:
        grid = _unit_grid(d1, resolution)
        blocks = np.einsum("na,ajbl,nb->njl", grid.conj(), s4, grid)
    else:
        grid = _unit_grid(d2, resolution)
        blocks = np.einsum("nj,ajbl,nl->nab", grid.conj(), s4, grid)
    lows = np.linalg.eigvalsh(0.5 * (blocks + blocks.conj().transpose(0, 2, 1)))[:, 0]
    best = int(np.argmin(lows))
    g = grid[best]
    if d1 <= d2:
        _, other = hs.canonical_min_eigvec(_contract_second(s4, g))
        u, v = g, other
    else:
        _, other = hs.canonical_min_eigvec(_contract_first(s4, g))
        u, v = other, g
    return product_expectation(sigma, u, v), u, v


def seesaw_min_product(
    sigma,
    dims,
    restarts: int = 64,
    max_iters: int = 200,
    tol: float = 1e-9,
    seed=0,
    grid_resolution: Optional[int] = 24,
    workers: int = 0,
) -> SeesawResult:
    """Minimize ``<u (x) v| sigma |u (x) v>`` over unit product vectors.

    Alternating minimization: with ``v`` fixed the objective is a Hermitian
    form in ``u`` minimized by its lowest eigenvector, and symmetrically for
    ``v``. Each run stops once an iteration lowers the value by less than
    ``tol``; the best of ``restarts`` random starts is kept (ties go to the
    lower restart index). For local dimensions up to 3 the result is also
    compared against :func:`grid_min_product`, whose best point seeds one more
    see-saw polish. The returned value is an upper bound on the true minimum.
    """
    sigma = hs.check_hermitian(sigma)
    d1, d2 = _dims(dims)
    if sigma.shape != (d1 * d2, d1 * d2):
        raise InvalidInputError(f"operator of shape {sigma.shape} does not act on a {d1}x{d2} system")
    if restarts < 1:
        raise InvalidInputError("restarts must be >= 1")
    s4 = sigma.reshape(d1, d2, d1, d2)
    rng = np.random.default_rng(seed)
    starts = [hs.random_pure(d2, rng) for _ in range(restarts)]

    def run(v0):
        return _seesaw_run(sigma, s4, v0, max_iters, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(v0) for v0 in starts]
    best_index = min(range(len(results)), key=lambda i: (results[i].value, i))
    best = results[best_index]
    best.restart_index = best_index

    if grid_resolution and grid_refinement_available((d1, d2)):
        gval, _, gv = grid_min_product(sigma, (d1, d2), grid_resolution)
        polished = _seesaw_run(sigma, s4, gv, max_iters, tol)
        if polished.value < best.value:
            polished.restart_index = restarts
            best = polished
        best.grid_value = gval
    return best


def grid_refinement_available(dims) -> bool:
    d1, d2 = _dims(dims)
    return max(d1, d2) <= GRID_MAX_DIM or min(d1, d2) == 1


# --------------------------------------------------------------------------- dual cone


def in_dual_sep_cone(sigma, dims, params: ConeParams = DEFAULT_PARAMS) -> ConeVerdict:
    """Does ``sigma`` pair nonnegatively with every element of P1 (x) P2?

    PSD operators are accepted outright (eigen certificate). Otherwise the
    product-vector minimum is searched; a negative value is a checkable
    product-pair certificate of non-membership. A nonnegative value is only
    reported as ``member`` where the grid refinement corroborates it, and as
    ``inconclusive`` elsewhere.
    """
    sigma = hs.check_hermitian(sigma)
    d1, d2 = _dims(dims)
    scale = _norm_scale(sigma)
    w = sigma / scale
    low, vec = hs.canonical_min_eigvec(w)
    if low >= -params.tol:
        return ConeVerdict(MEMBER, low * scale, WitnessCertificate("eigen", low * scale, eigenvector=vec))
    res = seesaw_min_product(
        w,
        (d1, d2),
        restarts=params.restarts,
        max_iters=params.max_iters,
        tol=params.tol,
        seed=params.seed,
        grid_resolution=params.grid_resolution,
        workers=_workers(params),
    )
    margin = product_expectation(sigma, res.u, res.v)
    cert = WitnessCertificate("product_pair", margin, u=res.u, v=res.v)
    if res.value < -params.tol:
        return ConeVerdict(NON_MEMBER, margin, cert)
    verdict = MEMBER if grid_refinement_available((d1, d2)) else INCONCLUSIVE
    return ConeVerdict(verdict, margin, cert)


# --------------------------------------------------------------------------- separable cone


@dataclass
class DecompositionSearch:
    success: bool
    decomposition: Optional[SeparableDecomposition]
    residual: float
    weight_sum: float
    iterations: int


def _herm_to_real(m: np.ndarray) -> np.ndarray:
    flat = m.ravel()
    return np.concatenate([flat.real, flat.imag])


def _product_projector(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    w = np.kron(u, v)
    return np.outer(w, w.conj())


def _marginal_eigenbasis_atoms(d: np.ndarray, dims: tuple[int, int], k: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Products of eigenvectors of the two marginals, heaviest first.

    Exact for product inputs ``A (x) B`` whenever ``k >= rank(A) rank(B)``.
    """
    w1, v1 = np.linalg.eigh(hs.partial_trace(d, dims, keep=1))
    w2, v2 = np.linalg.eigh(hs.partial_trace(d, dims, keep=2))
    pairs = [
        (w1[i] * w2[j], i, j)
        for i in range(len(w1))
        for j in range(len(w2))
        if w1[i] > 1e-12 and w2[j] > 1e-12
    ]
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    return [(v1[:, i], v2[:, j]) for _, i, j in pairs[:k]]


class _Fit:
    """Nonnegative least-squares fit of ``d`` by a pool of product projectors."""

    def __init__(self, d: np.ndarray, dims: tuple[int, int]):
        self.d = d
        self.dims = dims
        self.target = np.concatenate([_herm_to_real(d), [1.0]])
        self.atoms: list[tuple[np.ndarray, np.ndarray]] = []
        self.weights = np.zeros(0)

    def column(self, u, v) -> np.ndarray:
        return np.concatenate([_herm_to_real(_product_projector(u, v)), [1.0]])

    def solve(self) -> None:
        a = np.stack([self.column(u, v) for u, v in self.atoms], axis=1)
        self.weights, _ = nnls(a, self.target, maxiter=50 * a.shape[1] + 100)

    def residual_matrix(self) -> np.ndarray:
        r = self.d.copy()
        for lam, (u, v) in zip(self.weights, self.atoms):
            if lam > 0:
                r = r - lam * _product_projector(u, v)
        return r


def decomposition_search(
    d,
    dims,
    k: Optional[int] = None,
    iters: int = 2000,
    tol: float = 1e-9,
    seed=0,
) -> DecompositionSearch:
    """Search for a convex decomposition of ``d`` into pure product states.

    The pool starts from products of marginal eigenvectors. Each iteration
    (1) fits nonnegative weights by least squares, (2) adds the product vector
    most aligned with the current residual (found by see-saw on the negated
    residual), evicting the lightest atom once ``k`` atoms are held, and
    (3) moves every active atom one alternating step towards the part of the
    residual it is responsible for. Success means HS residual and weight-sum
    error both at most ``tol``.
    """
    d = hs.check_density(d, tol=1e-10)
    d1, d2 = _dims(dims)
    if d.shape != (d1 * d2, d1 * d2):
        raise InvalidInputError(f"density of shape {d.shape} does not act on a {d1}x{d2} system")
    n = d1 * d2
    k = n * n if k is None else int(k)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    fit = _Fit(d, (d1, d2))
    fit.atoms = _marginal_eigenbasis_atoms(d, (d1, d2), k)
    if not fit.atoms:
        fit.atoms = [(hs.random_pure(d1, rng), hs.random_pure(d2, rng))]
    fit.solve()

    def status():
        r = fit.residual_matrix()
        return hs.hs_norm(r), abs(float(fit.weights.sum()) - 1.0), r

    residual, sum_err, r = status()
    it = 0
    best_residual, best_at = residual, 0
    while (residual > tol or sum_err > tol) and it < iters:
        if it - best_at > STAGNATION_WINDOW:
            break
        it += 1
        cand = seesaw_min_product(
            -r, (d1, d2), restarts=2, max_iters=30, tol=1e-12, seed=rng, grid_resolution=None
        )
        if len(fit.atoms) >= k:
            drop = int(np.argmin(fit.weights))
            del fit.atoms[drop]
            fit.weights = np.delete(fit.weights, drop)
        fit.atoms.append((cand.u, cand.v))
        fit.weights = np.append(fit.weights, 0.0)
        fit.solve()
        r = fit.residual_matrix()
        for i, (lam, (u, v)) in enumerate(zip(fit.weights, fit.atoms)):
            if lam <= 0:
                continue
            target = (r + lam * _product_projector(u, v)).reshape(d1, d2, d1, d2)
            _, u = hs.canonical_min_eigvec(-_contract_first(target, v))
            _, v = hs.canonical_min_eigvec(-_contract_second(target, u))
            r = target.reshape(n, n) - lam * _product_projector(u, v)
            fit.atoms[i] = (u, v)
        fit.solve()
        residual, sum_err, r = status()
        if residual < (1.0 - STAGNATION_GAIN) * best_residual:
            best_residual, best_at = residual, it

    keep = [i for i, lam in enumerate(fit.weights) if lam > 0]
    if not keep:
        return DecompositionSearch(False, None, residual, float(fit.weights.sum()), it)
    lams = fit.weights[keep]
    lams = lams / lams.sum()
    dec = SeparableDecomposition.from_product_vectors(lams, [fit.atoms[i][0] for i in keep], [fit.atoms[i][1] for i in keep])
    residual = hs.hs_norm(d - synthesize_state(dec))
    success = residual <= tol and sum_err <= tol
    return DecompositionSearch(success, dec if success else None, residual, float(fit.weights.sum()), it)


def in_sep_cone(v, dims, params: ConeParams = DEFAULT_PARAMS) -> ConeVerdict:
    """Membership in the separable cone P1 (x) P2.

    Ladder: normalize the trace; a negative partial transpose refutes
    membership; on PPT-decisive dimensions (or a trivial factor) a PPT input
    is a member; elsewhere a decomposition search either proves membership or
    the verdict is ``inconclusive``.
    """
    v = hs.check_psd(v)
    d1, d2 = _dims(dims)
    if v.shape != (d1 * d2, d1 * d2):
        raise InvalidInputError(f"operator of shape {v.shape} does not act on a {d1}x{d2} system")
    scale = float(np.trace(v).real)
    if scale <= 0:
        return ConeVerdict(MEMBER, 0.0, WitnessCertificate("ppt", 0.0))
    w = v / scale
    w = 0.5 * (w + w.conj().T)
    ppt = ppt_min_eigenvalue(w, (d1, d2))
    ppt_cert = WitnessCertificate("ppt", ppt * scale)
    if ppt < -params.tol:
        return ConeVerdict(NON_MEMBER, ppt * scale, ppt_cert)

    decisive = (d1, d2) in DECISIVE_DIMS or min(d1, d2) == 1
    budget = params.certify_iters if decisive else params.decomp_iters
    search = decomposition_search(w, (d1, d2), k=params.decomp_k, iters=budget, tol=params.decomp_tol, seed=params.seed)
    if search.success:
        margin = -search.residual * scale
        cert = WitnessCertificate("decomposition", margin, decomposition=search.decomposition, scale=scale)
        return ConeVerdict(MEMBER, margin, cert)
    if decisive:
        return ConeVerdict(MEMBER, ppt * scale, ppt_cert)
    return ConeVerdict(INCONCLUSIVE, ppt * scale, ppt_cert)


# --------------------------------------------------------------------------- certificates


def certificate_margin(obj, cert: WitnessCertificate, dims=None) -> float:
    """Re-evaluate a certificate against the operator it was issued for."""
    obj = hs.as_square(obj)
    if cert.kind == "eigen":
        w = cert.eigenvector / np.linalg.norm(cert.eigenvector)
        return float(np.vdot(w, obj @ w).real)
    if cert.kind == "hermiticity":
        return -hs.hermiticity_defect(obj)
    if cert.kind == "product_pair":
        return product_expectation(obj, cert.u, cert.v)
    if cert.kind == "ppt":
        if dims is None:
            raise InvalidInputError("ppt certificates need dims")
        pt = hs.partial_transpose(obj, dims, side=2)
        return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])
    if cert.kind == "decomposition":
        return -hs.hs_norm(obj - cert.scale * synthesize_state(cert.decomposition))
    raise InvalidInputError(f"unknown certificate kind {cert.kind!r}")


def with_seed(params: ConeParams, seed: int) -> ConeParams:
    return replace(params, seed=seed)
