"""Dense linear algebra on finite-dimensional Hilbert and Hilbert-Schmidt spaces.

Operators are plain complex ``numpy`` arrays. A square operator doubles as a
vector of the Hilbert-Schmidt space K with inner product ``Tr(a^* b)``; a
vector of K1 (x) K2 is stored as one operator on H1 (x) H2 through the
identification ``x (x) y -> kron(x, y)``.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-12
CLAMP_TOL = 1e-10


def as_operator(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex array, rejecting anything else."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected a non-empty matrix, got shape {arr.shape}")
    return arr


def as_square(a) -> np.ndarray:
    arr = as_operator(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entry of ``|a - a^*|``."""
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(a)
    return arr.ndim == 2 and arr.shape[0] == arr.shape[1] and hermiticity_defect(arr) <= tol


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    arr = as_square(a)
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise InvalidInputError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")
    return arr


def check_psd(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a Hermitian positive semidefinite matrix and return it."""
    arr = check_hermitian(a, tol)
    low = float(np.linalg.eigvalsh(_symmetrize(arr))[0])
    if low < -tol:
        raise InvalidInputError(f"matrix is not positive semidefinite (min eigenvalue {low:.3e})")
    return arr


def check_density(a, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD and unit trace, all within ``tol``."""
    arr = as_square(a)
    defect = hermiticity_defect(arr)
    if defect > tol:
        raise InvalidInputError(f"density matrix is not Hermitian (defect {defect:.3e})")
    low = float(np.linalg.eigvalsh(_symmetrize(arr))[0])
    if low < -tol:
        raise InvalidInputError(f"density matrix has negative eigenvalue {low:.3e}")
    tr = np.trace(arr)
    if abs(tr - 1.0) > tol:
        raise InvalidInputError(f"density matrix trace is {tr.real:.15g}, expected 1")
    return arr


def check_pure(x, tol: float = DENSITY_TOL) -> np.ndarray:
    vec = np.asarray(x, dtype=complex)
    if vec.ndim != 1 or vec.size == 0:
        raise InvalidInputError(f"expected a non-empty vector, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > tol:
        raise InvalidInputError(f"pure vector has norm {norm:.15g}, expected 1")
    return vec


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^* b)``, antilinear in ``a``."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(as_operator(a)))


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns.
    """
    arr = check_hermitian(a, tol)
    return np.linalg.eigh(_symmetrize(arr))


def canonical_min_eigvec(h: np.ndarray, degeneracy_tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Minimal eigenvalue with a deterministic choice of eigenvector.

    Inside a degenerate minimal eigenspace the vector with the largest possible
    modulus in the first coordinate is chosen (the normalized projection of
    the first basis vector that survives projection), then its phase is fixed so
    that coordinate is real and positive.
    """
    w, v = np.linalg.eigh(_symmetrize(h))
    low = w[0]
    scale = max(1.0, float(np.max(np.abs(w))))
    space = v[:, w <= low + degeneracy_tol * scale]
    if space.shape[1] == 1:
        vec = space[:, 0]
    else:
        vec = None
        for k in range(space.shape[0]):
            proj = space @ space[k].conj()
            norm = np.linalg.norm(proj)
            if norm > 1e-8:
                vec = proj / norm
                break
        assert vec is not None
    lead = np.flatnonzero(np.abs(vec) > 1e-12)[0]
    vec = vec * (abs(vec[lead]) / vec[lead])
    return float(low), vec


def mat_power(a, p: float, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Power of a positive semidefinite matrix by spectral calculus.

    Eigenvalues in ``[-clamp_tol, 0)`` are treated as rounding noise and set to
    zero; anything more negative is rejected. ``p`` is normally 1/4 or 1/2 but
    any positive exponent works, and negative exponents work for invertible
    input.
    """
    arr = check_hermitian(a)
    w, v = np.linalg.eigh(_symmetrize(arr))
    if w[0] < -clamp_tol:
        raise InvalidInputError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    if p < 0 and w[0] == 0.0:
        raise InvalidInputError("negative power of a singular matrix")
    return (v * w**p) @ v.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def rank_one(x, y) -> np.ndarray:
    """The dyad ``|x><y|`` acting by ``z -> <y, z> x``.

    For 1-D inputs this is an operator on H. For matrix inputs the vectors
    live in K and the dyad is an operator on K, written in the row-major
    flattening of K (``vec(mu) = mu.ravel()``).
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape or x.ndim not in (1, 2):
        raise InvalidInputError(f"rank_one needs two vectors of one space, got {x.shape} and {y.shape}")
    return np.outer(x.ravel(), y.ravel().conj())


def left_multiplication_superop(a) -> np.ndarray:
    """Matrix of ``mu -> a @ mu`` on K in the row-major flattening."""
    a = as_square(a)
    return np.kron(a, np.eye(a.shape[0]))


def _check_bipartite(a: np.ndarray, dims) -> tuple[int, int]:
    d1, d2 = (int(d) for d in dims)
    if d1 < 1 or d2 < 1:
        raise InvalidInputError(f"invalid dims {dims}")
    if a.shape != (d1 * d2, d1 * d2):
        raise InvalidInputError(f"matrix of shape {a.shape} does not act on a {d1}x{d2} system")
    return d1, d2


def partial_transpose(a, dims, side: int = 2) -> np.ndarray:
    a = as_operator(a)
    d1, d2 = _check_bipartite(a, dims)
    t = a.reshape(d1, d2, d1, d2)
    if side == 1:
        t = t.transpose(2, 1, 0, 3)
    elif side == 2:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise InvalidInputError(f"side must be 1 or 2, got {side}")
    return t.reshape(d1 * d2, d1 * d2)


def partial_trace(a, dims, keep: int = 1) -> np.ndarray:
    a = as_operator(a)
    d1, d2 = _check_bipartite(a, dims)
    t = a.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ijkj->ik", t)
    if keep == 2:
        return np.einsum("ijil->jl", t)
    raise InvalidInputError(f"keep must be 1 or 2, got {keep}")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def _check_dim(dim) -> int:
    dim = int(dim)
    if dim < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {dim}")
    return dim


def random_psd(dim: int, seed=None) -> np.ndarray:
    """Random PSD matrix ``G G^*`` with ``G`` complex Ginibre."""
    dim = _check_dim(dim)
    g = _ginibre(_rng(seed), dim, dim)
    return g @ g.conj().T


def random_density(dim: int, seed=None) -> np.ndarray:
    """Random density matrix from the Ginibre ensemble (Hilbert-Schmidt measure)."""
    psd = random_psd(dim, seed)
    rho = psd / np.trace(psd).real
    return _symmetrize(rho)


def random_pure(dim: int, seed=None) -> np.ndarray:
    """Haar-random unit vector from a normalized complex Gaussian."""
    dim = _check_dim(dim)
    v = _ginibre(_rng(seed), dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, seed=None) -> np.ndarray:
    dim = _check_dim(dim)
    g = _ginibre(_rng(seed), dim, dim)
    return 0.5 * (g + g.conj().T)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    dim = _check_dim(dim)
    q, r = np.linalg.qr(_ginibre(_rng(seed), dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def projector(x) -> np.ndarray:
    """``|x><x|`` for a 1-D vector."""
    x = np.asarray(x, dtype=complex)
    return np.outer(x, x.conj())


def basis_vector(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e
