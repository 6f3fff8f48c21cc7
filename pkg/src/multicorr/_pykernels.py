"""Batched numpy implementation of the numerical kernels.

This is the reference backend. ``_ckernels`` implements the same four
functions with identical signatures and is preferred when it is built.

All matrix kernels accept either a single ``(n, n)`` matrix or a stack
``(batch, n, n)``; the Jacobi rotations are applied to every matrix of
the stack at once.
"""
import numpy as np

MAX_SWEEPS = 60
_EPS = np.finfo(float).eps

# sigma_y (x) sigma_y is the anti-diagonal with signs (-1, 1, 1, -1), so
# (YY) X (YY) has entries y_i y_j X[3-i, 3-j].
_YY_SIGNS = np.array([-1.0, 1.0, 1.0, -1.0])
_YY_OUTER = np.outer(_YY_SIGNS, _YY_SIGNS)


def _as_stack(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 2:
        return a[None].copy(), True
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (n, n) or (batch, n, n) matrices, got shape {a.shape}")
    return a.copy(), False


def _unit_scale(a):
    """Divide each matrix by its largest real or imaginary magnitude."""
    big = np.maximum(np.abs(a.real), np.abs(a.imag)).max(axis=(1, 2), initial=0.0)
    big = np.where(big > 0.0, big, 1.0)
    # real and imaginary parts separately: complex division overflows on subnormals
    d = big[:, None, None]
    return (a.real / d) + 1j * (a.imag / d), big


def _sign(x):
    return np.where(x >= 0.0, 1.0, -1.0)


def jacobi_eigh(a):
    """Eigen-decomposition of complex Hermitian matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (n, n) or (batch, n, n)
        Hermitian matrices. Only Hermitian input gives meaningful output;
        no symmetrisation is performed.

    Returns
    -------
    w : ndarray, shape (n,) or (batch, n)
        Eigenvalues in ascending order.
    v : ndarray, shape (n, n) or (batch, n, n)
        Unitary matrices whose columns are the matching eigenvectors.
    """
    a, single = _as_stack(a)
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    # unit max-entry scaling keeps subnormal and huge inputs finite
    a, big = _unit_scale(a)
    scale = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    tiny = np.maximum(scale, 1e-300) * _EPS * 1e-2
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(MAX_SWEEPS):
        if not np.any(np.abs(a[:, offdiag]).max(axis=1, initial=0.0) > tiny):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                g = np.abs(apq)
                active = g > tiny
                if not active.any():
                    continue
                gs = np.where(active, g, 1.0)
                phase = np.where(active, apq / gs, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * gs)
                t = _sign(theta) / (np.abs(theta) + np.hypot(1.0, theta))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Q = diag(1, e^{-i phi}) R, applied as A <- Q^H A Q, V <- V Q.
                ph = np.conj(phase)
                cp = a[:, :, p].copy()
                cq = a[:, :, q]
                a[:, :, p] = c[:, None] * cp - (s * ph)[:, None] * cq
                a[:, :, q] = s[:, None] * cp + (c * ph)[:, None] * cq
                rp = a[:, p, :].copy()
                rq = a[:, q, :]
                a[:, p, :] = c[:, None] * rp - (s * phase)[:, None] * rq
                a[:, q, :] = s[:, None] * rp + (c * phase)[:, None] * rq
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = np.where(active, 0.0, a[:, q, p])
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = c[:, None] * vp - (s * ph)[:, None] * vq
                v[:, :, q] = s[:, None] * vp + (c * ph)[:, None] * vq
    w = np.real(np.diagonal(a, axis1=1, axis2=2)) * big[:, None]
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    if single:
        return w[0], v[0]
    return w, v


def singular_values(b):
    """Singular values of square complex matrices by one-sided (Hestenes) Jacobi.

    Columns are rotated pairwise until mutually orthogonal; the singular
    values are the final column norms, returned in descending order.
    Small singular values keep absolute accuracy of order eps * ||b||,
    which the eigenvalues of ``b b^H`` followed by a square root do not.
    """
    b, single = _as_stack(b)
    nb, m, n = b.shape
    b, big = _unit_scale(b)
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                bp = b[:, :, p]
                bq = b[:, :, q]
                alpha = np.sum(np.abs(bp) ** 2, axis=1)
                beta = np.sum(np.abs(bq) ** 2, axis=1)
                gamma = np.sum(np.conj(bp) * bq, axis=1)
                g = np.abs(gamma)
                active = g > _EPS * np.sqrt(alpha * beta)
                active &= g > 1e-300
                if not active.any():
                    continue
                rotated = True
                gs = np.where(active, g, 1.0)
                ph = np.conj(np.where(active, gamma / gs, 1.0))
                zeta = (beta - alpha) / (2.0 * gs)
                t = _sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                old_p = bp.copy()
                b[:, :, p] = c[:, None] * old_p - (s * ph)[:, None] * bq
                b[:, :, q] = s[:, None] * old_p + (c * ph)[:, None] * bq
        if not rotated:
            break
    sv = np.sqrt(np.sum(np.abs(b) ** 2, axis=1)) * big[:, None]
    sv = -np.sort(-sv, axis=1)
    return sv[0] if single else sv


def concurrence_batch(rho):
    """Wootters concurrence of a stack of two-qubit density matrices.

    The square roots of the eigenvalues of rho * rho_tilde are computed as
    the singular values of sqrt(rho) (YY) conj(sqrt(rho)) (YY), whose Gram
    matrix is sqrt(rho) rho_tilde sqrt(rho).
    """
    rho, single = _as_stack(rho)
    if rho.shape[1:] != (4, 4):
        raise ValueError(f"concurrence needs 4x4 matrices, got {rho.shape[1:]}")
    w, v = jacobi_eigh(rho)
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
    flipped = _YY_OUTER * np.conj(root[:, ::-1, ::-1])
    sv = singular_values(root @ flipped)
    c = np.maximum(sv[:, 0] - sv[:, 1] - sv[:, 2] - sv[:, 3], 0.0)
    return float(c[0]) if single else c


def _reduced(t, keep, n):
    """Reduced density matrices of a batch of state tensors over ``keep``."""
    nb = t.shape[0]
    other = [k for k in range(n) if k not in keep]
    axes = [0] + [k + 1 for k in keep] + [k + 1 for k in other]
    m = np.transpose(t, axes).reshape(nb, 2 ** len(keep), -1)
    return m @ np.conj(np.swapaxes(m, 1, 2))


def correlation_core(psi, n):
    """Linear entropies and pairwise squared concurrences of pure states.

    Parameters
    ----------
    psi : array_like, shape (batch, 2**n)
        Normalised amplitude vectors, qubit 0 the most significant bit.
    n : int
        Number of qubits.

    Returns
    -------
    tau : ndarray, shape (batch, n)
        ``2 (1 - tr rho_k^2)`` for every qubit.
    c2 : ndarray, shape (batch, n, n)
        Symmetric squared concurrences with zero diagonal.
    """
    psi = np.ascontiguousarray(psi, dtype=np.complex128)
    if psi.ndim != 2 or psi.shape[1] != 2 ** n:
        raise ValueError(f"expected shape (batch, {2 ** n}), got {psi.shape}")
    nb = psi.shape[0]
    if nb == 0:
        return np.empty((0, n)), np.zeros((0, n, n))
    t = psi.reshape((nb,) + (2,) * n)
    tau = np.empty((nb, n))
    for k in range(n):
        r = _reduced(t, [k], n)
        tau[:, k] = 2.0 * (1.0 - np.sum(np.abs(r) ** 2, axis=(1, 2)))
    c2 = np.zeros((nb, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pairs:
        stack = np.concatenate([_reduced(t, [i, j], n) for i, j in pairs])
        conc = concurrence_batch(stack).reshape(len(pairs), nb)
        for idx, (i, j) in enumerate(pairs):
            c2[:, i, j] = c2[:, j, i] = conc[idx] ** 2
    return tau, c2
