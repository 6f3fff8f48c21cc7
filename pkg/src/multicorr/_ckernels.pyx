# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels, API-compatible with ``multicorr._pykernels``.

Every batch loop runs without the GIL so callers may split work across
threads.
"""
import numpy as np

from libc.math cimport fabs, hypot, sqrt

cdef int MAX_SWEEPS = 60
cdef double EPS = 2.220446049250313e-16


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double _cabs(double complex z) noexcept nogil:
    # hypot avoids the underflow of re^2 + im^2 near 1e-160
    return hypot(z.real, z.imag)


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline double _sign(double x) noexcept nogil:
    return 1.0 if x >= 0.0 else -1.0


cdef double _unit_scale(double complex* a, int size) noexcept nogil:
    # Divide by the largest |re| or |im|; parts separately so subnormals survive.
    cdef int i
    cdef double big = 0.0
    for i in range(size):
        if fabs(a[i].real) > big:
            big = fabs(a[i].real)
        if fabs(a[i].imag) > big:
            big = fabs(a[i].imag)
    if big == 0.0:
        return 1.0
    for i in range(size):
        a[i] = a[i].real / big + 1j * (a[i].imag / big)
    return big


cdef void _eigh(double complex* a, int n, double* w, double complex* v) noexcept nogil:
    # In-place cyclic Jacobi on row-major Hermitian a; v receives eigenvectors as columns.
    cdef int i, j, p, q, k, sweep
    cdef double scale = 0.0, big = 0.0, tiny, off, g, theta, t, c, s
    cdef double complex phase, ph, xp, xq
    big = _unit_scale(a, n * n)
    for i in range(n * n):
        scale += _abs2(a[i])
        v[i] = 0.0
    for i in range(n):
        v[i * n + i] = 1.0
    scale = sqrt(scale)
    tiny = (scale if scale > 1e-300 else 1e-300) * EPS * 1e-2
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j and _cabs(a[i * n + j]) > off:
                    off = _cabs(a[i * n + j])
        if off <= tiny:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = _cabs(a[p * n + q])
                if g <= tiny:
                    continue
                phase = a[p * n + q] / g
                ph = _conj(phase)
                theta = (a[q * n + q].real - a[p * n + p].real) / (2.0 * g)
                t = _sign(theta) / (fabs(theta) + hypot(1.0, theta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    xp = a[k * n + p]
                    xq = a[k * n + q]
                    a[k * n + p] = c * xp - s * ph * xq
                    a[k * n + q] = s * xp + c * ph * xq
                for k in range(n):
                    xp = a[p * n + k]
                    xq = a[q * n + k]
                    a[p * n + k] = c * xp - s * phase * xq
                    a[q * n + k] = s * xp + c * phase * xq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                for k in range(n):
                    xp = v[k * n + p]
                    xq = v[k * n + q]
                    v[k * n + p] = c * xp - s * ph * xq
                    v[k * n + q] = s * xp + c * ph * xq
    for i in range(n):
        w[i] = a[i * n + i].real * big


cdef void _svals(double complex* b, int n, double* sv) noexcept nogil:
    # One-sided Jacobi on the columns of row-major b (destroyed); sv unsorted.
    cdef int i, p, q, sweep, rotated
    cdef double alpha, beta, g, zeta, t, c, s, big = 0.0
    cdef double complex gamma, ph, xp, xq
    big = _unit_scale(b, n * n)
    for sweep in range(MAX_SWEEPS):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(n):
                    alpha += _abs2(b[i * n + p])
                    beta += _abs2(b[i * n + q])
                    gamma = gamma + _conj(b[i * n + p]) * b[i * n + q]
                g = _cabs(gamma)
                if g <= EPS * sqrt(alpha * beta) or g <= 1e-300:
                    continue
                rotated = 1
                ph = _conj(gamma / g)
                zeta = (beta - alpha) / (2.0 * g)
                t = _sign(zeta) / (fabs(zeta) + hypot(1.0, zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    xp = b[i * n + p]
                    xq = b[i * n + q]
                    b[i * n + p] = c * xp - s * ph * xq
                    b[i * n + q] = s * xp + c * ph * xq
        if not rotated:
            break
    for p in range(n):
        alpha = 0.0
        for i in range(n):
            alpha += _abs2(b[i * n + p])
        sv[p] = sqrt(alpha) * big


cdef double _concurrence4(const double complex* rho) noexcept nogil:
    cdef double complex a[16]
    cdef double complex v[16]
    cdef double complex root[16]
    cdef double complex bmat[16]
    cdef double w[4]
    cdef double sv[4]
    cdef double y[4]
    cdef double tmp, c
    cdef double complex acc
    cdef int i, j, k
    y[0] = -1.0
    y[1] = 1.0
    y[2] = 1.0
    y[3] = -1.0
    for i in range(16):
        a[i] = rho[i]
    _eigh(a, 4, w, v)
    for k in range(4):
        w[k] = sqrt(w[k]) if w[k] > 0.0 else 0.0
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc = acc + v[i * 4 + k] * w[k] * _conj(v[j * 4 + k])
            root[i * 4 + j] = acc
    # bmat = root @ (YY conj(root) YY)
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc = acc + root[i * 4 + k] * (y[k] * y[j]) * _conj(root[(3 - k) * 4 + (3 - j)])
            bmat[i * 4 + j] = acc
    _svals(bmat, 4, sv)
    for i in range(1, 4):
        tmp = sv[i]
        j = i - 1
        while j >= 0 and sv[j] < tmp:
            sv[j + 1] = sv[j]
            j -= 1
        sv[j + 1] = tmp
    c = sv[0] - sv[1] - sv[2] - sv[3]
    return c if c > 0.0 else 0.0


def _as_stack(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 2:
        return np.ascontiguousarray(a[None]), True
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected (n, n) or (batch, n, n) matrices, got shape {a.shape}")
    return np.ascontiguousarray(a), False


def jacobi_eigh(a):
    """Eigenvalues (ascending) and eigenvectors of complex Hermitian matrices."""
    arr, single = _as_stack(a)
    work = arr.copy()
    cdef double complex[:, :, ::1] wv = work
    cdef Py_ssize_t nb = arr.shape[0]
    cdef int n = <int>arr.shape[1]
    vecs = np.empty_like(arr)
    vals = np.empty((nb, n))
    cdef double complex[:, :, ::1] vv = vecs
    cdef double[:, ::1] ww = vals
    cdef Py_ssize_t b
    if n > 0:
        with nogil:
            for b in range(nb):
                _eigh(&wv[b, 0, 0], n, &ww[b, 0], &vv[b, 0, 0])
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vecs = np.take_along_axis(vecs, order[:, None, :], axis=2)
    if single:
        return vals[0], vecs[0]
    return vals, vecs


def singular_values(b):
    """Singular values (descending) of square complex matrices by one-sided Jacobi."""
    arr, single = _as_stack(b)
    work = arr.copy()
    cdef double complex[:, :, ::1] wv = work
    cdef Py_ssize_t nb = arr.shape[0]
    cdef int n = <int>arr.shape[1]
    out = np.empty((nb, n))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i
    if n > 0:
        with nogil:
            for i in range(nb):
                _svals(&wv[i, 0, 0], n, &ov[i, 0])
    out = -np.sort(-out, axis=1)
    return out[0] if single else out


def concurrence_batch(rho):
    """Wootters concurrence of a stack of two-qubit density matrices."""
    arr, single = _as_stack(rho)
    if arr.shape[1:] != (4, 4):
        raise ValueError(f"concurrence needs 4x4 matrices, got {arr.shape[1:]}")
    cdef const double complex[:, :, ::1] rv = arr
    cdef Py_ssize_t nb = arr.shape[0]
    out = np.empty(nb)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(nb):
            ov[i] = _concurrence4(&rv[i, 0, 0])
    return float(out[0]) if single else out


cdef void _state_core(const double complex* psi, int n, double* tau, double* c2) noexcept nogil:
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n
    cdef Py_ssize_t x, y
    cdef int i, j, bi, bj, ai, aj, si, sj
    cdef double complex r1[4]
    cdef double complex r2[16]
    cdef double complex amp
    cdef double purity, conc
    for i in range(n * n):
        c2[i] = 0.0
    for i in range(n):
        si = n - 1 - i
        for ai in range(4):
            r1[ai] = 0.0
        for x in range(dim):
            amp = psi[x]
            if amp.real == 0.0 and amp.imag == 0.0:
                continue
            bi = (x >> si) & 1
            for ai in range(2):
                y = (x & ~((<Py_ssize_t>1) << si)) | ((<Py_ssize_t>ai) << si)
                r1[bi * 2 + ai] = r1[bi * 2 + ai] + amp * _conj(psi[y])
        purity = 0.0
        for ai in range(4):
            purity += _abs2(r1[ai])
        tau[i] = 2.0 * (1.0 - purity)
    for i in range(n - 1):
        si = n - 1 - i
        for j in range(i + 1, n):
            sj = n - 1 - j
            for ai in range(16):
                r2[ai] = 0.0
            for x in range(dim):
                amp = psi[x]
                if amp.real == 0.0 and amp.imag == 0.0:
                    continue
                bi = (x >> si) & 1
                bj = (x >> sj) & 1
                for ai in range(2):
                    for aj in range(2):
                        y = x & ~(((<Py_ssize_t>1) << si) | ((<Py_ssize_t>1) << sj))
                        y = y | ((<Py_ssize_t>ai) << si) | ((<Py_ssize_t>aj) << sj)
                        r2[(bi * 2 + bj) * 4 + ai * 2 + aj] = (
                            r2[(bi * 2 + bj) * 4 + ai * 2 + aj] + amp * _conj(psi[y])
                        )
            conc = _concurrence4(r2)
            c2[i * n + j] = conc * conc
            c2[j * n + i] = conc * conc


def correlation_core(psi, int n):
    """Linear entropies ``(batch, n)`` and squared concurrences ``(batch, n, n)``."""
    arr = np.ascontiguousarray(psi, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[1] != 2 ** n:
        raise ValueError(f"expected shape (batch, {2 ** n}), got {arr.shape}")
    cdef const double complex[:, ::1] pv = arr
    cdef Py_ssize_t nb = arr.shape[0]
    tau = np.empty((nb, n))
    c2 = np.empty((nb, n, n))
    cdef double[:, ::1] tv = tau
    cdef double[:, :, ::1] cv = c2
    cdef Py_ssize_t b
    if nb:
        with nogil:
            for b in range(nb):
                _state_core(&pv[b, 0], n, &tv[b, 0], &cv[b, 0, 0])
    return tau, c2
