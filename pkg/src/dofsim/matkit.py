"""Small dense complex linear algebra.

Everything here works on numpy arrays. Functions that take a matrix also
accept a stack of matrices (leading batch axes) unless stated otherwise,
which is how the scheme simulators call them: one matrix per Monte Carlo
trial.
"""

import numpy as np

__all__ = [
    "LinAlgError",
    "complex_normal",
    "hermitian",
    "orth_complement",
    "null_space_basis",
    "range_basis",
    "logdet_posdef",
    "eig_hermitian",
]

_HERMITIAN_TOL = 1e-9
_RANK_RTOL = 1e-10


class LinAlgError(ValueError):
    """Raised when a matrix does not meet an operation's precondition."""


def complex_normal(rng, shape, var=1.0):
    """Draw CN(0, var) entries: independent real and imaginary N(0, var/2)."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return np.sqrt(var / 2.0) * (z[..., 0] + 1j * z[..., 1])


def hermitian(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def _fix_phase(cols, tol=0.0):
    """Rotate each column so its first entry with |.| > tol is real >= 0.

    ``cols`` has shape (..., M, k); the phase is fixed per column.
    """
    mag = np.abs(cols)
    first = np.argmax(mag > tol, axis=-2)
    pivot = np.take_along_axis(cols, first[..., None, :], axis=-2)
    pmag = np.abs(pivot)
    phase = np.where(pmag > 0, np.conj(pivot) / np.where(pmag > 0, pmag, 1.0), 1.0)
    return cols * phase


def orth_complement(v):
    """Unit vector orthogonal to a complex 2-vector.

    Parameters
    ----------
    v : array_like, shape (..., 2)
        Nonzero direction(s); the input does not need to be normalized.

    Returns
    -------
    w : ndarray, shape (..., 2)
        ``v^H w = 0`` and ``||w|| = 1``. The first nonzero entry of ``w`` is
        real and nonnegative.
    """
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != 2:
        raise ValueError("orth_complement expects 2-vectors")
    norm = np.linalg.norm(v, axis=-1)
    if np.any(norm == 0) or not np.all(np.isfinite(norm)):
        raise LinAlgError("degenerate direction")
    w = np.stack([-np.conj(v[..., 1]), np.conj(v[..., 0])], axis=-1) / norm[..., None]
    return _fix_phase(w[..., :, None], tol=1e-15 * np.max(np.abs(w)))[..., 0]


def _svd_rank(a):
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[..., :1] if s.shape[-1] else np.zeros(a.shape[:-2] + (1,))
    tol = _RANK_RTOL * max(a.shape[-2:]) * smax
    rank = np.sum(s > tol, axis=-1)
    return rank, vh


def null_space_basis(a, k):
    """Orthonormal M x k basis of part of the null space of an N x M matrix.

    Raises
    ------
    LinAlgError
        If ``M - rank(A) < k`` for any matrix in the stack.
    """
    a = np.asarray(a, dtype=complex)
    m = a.shape[-1]
    rank, vh = _svd_rank(a)
    if np.any(m - rank < k):
        raise LinAlgError(
            f"null space dimension {int(np.min(m - rank))} is smaller than k={k}"
        )
    # svd orders singular values descending, so rows rank..M-1 of vh span the
    # null space; all matrices in a stack share the same rank here in practice.
    r = int(np.max(rank))
    q = hermitian(vh)[..., :, r:r + k]
    return _fix_phase(q, tol=1e-12)


def range_basis(a):
    """Orthonormal M x N basis of the conjugate row space of an N x M matrix.

    The columns span R(A^H), so ``A Q`` is invertible and ``A Q_perp = 0``
    for the complementary :func:`null_space_basis`.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[-2]
    rank, vh = _svd_rank(a)
    if np.any(rank < n):
        raise LinAlgError("matrix is rank deficient")
    return _fix_phase(hermitian(vh)[..., :, :n], tol=1e-12)


def _check_hermitian(a):
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    asym = np.linalg.norm(a - hermitian(a), axis=(-2, -1))
    if np.any(asym >= _HERMITIAN_TOL * scale):
        raise LinAlgError("matrix is not Hermitian")


def logdet_posdef(a, bits=False):
    """log det of a Hermitian positive-definite matrix via Cholesky.

    Returns nats by default, bits when ``bits=True``. Works on stacks.
    """
    a = np.asarray(a)
    _check_hermitian(a)
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise LinAlgError("not positive definite") from exc
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise LinAlgError("not positive definite")
    out = 2.0 * np.sum(np.log(diag), axis=-1)
    return out / np.log(2.0) if bits else out


def _eig2(a):
    p, d = np.real(a[0, 0]), np.real(a[1, 1])
    b = a[0, 1]
    mid = 0.5 * (p + d)
    rad = np.hypot(0.5 * (p - d), abs(b))
    return np.array([mid + rad, mid - rad])


def eig_hermitian(a, vectors=False, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a single Hermitian matrix, in descending order.

    Uses the closed form for 2 x 2 input and cyclic complex Jacobi
    rotations otherwise. With ``vectors=True`` returns ``(w, V)`` where the
    columns of ``V`` are the matching eigenvectors (always computed by
    Jacobi, including the 2 x 2 case).
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eig_hermitian expects one square matrix")
    _check_hermitian(a)
    n = a.shape[0]
    if n == 2 and not vectors:
        return _eig2(a)
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                # make the (p, q) entry real positive, then a real rotation
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * np.conj(phase)
                g[q, q] = c * np.conj(phase)
                a = g.conj().T @ a @ g
                a[p, q] = a[q, p] = 0.0
                v = v @ g
    else:
        raise LinAlgError("Jacobi iteration did not converge")
    w = np.real(np.diag(a))
    order = np.argsort(w)[::-1]
    if vectors:
        return w[order], v[:, order]
    return w[order]
