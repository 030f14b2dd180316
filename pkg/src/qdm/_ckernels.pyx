# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled in-place gate kernels on batched state vectors.

All kernels act on a C-contiguous ``complex128`` array of shape
``(batch, 2**n)``. Qubit 0 is the most significant bit of the basis index.
Inner loops work on the interleaved (re, im) doubles directly.
"""


cdef inline Py_ssize_t _insert_zero(Py_ssize_t k, int pos) noexcept nogil:
    # insert a 0 bit at bit position ``pos`` (0 = least significant)
    cdef Py_ssize_t low = k & ((<Py_ssize_t>1 << pos) - 1)
    return ((k >> pos) << (pos + 1)) | low


cdef inline void _mix2(double* p, Py_ssize_t i0, Py_ssize_t i1, const double* m) noexcept nogil:
    # m = [re00, im00, re01, im01, re10, im10, re11, im11]
    cdef double ar = p[2 * i0], ai = p[2 * i0 + 1]
    cdef double br = p[2 * i1], bi = p[2 * i1 + 1]
    p[2 * i0] = m[0] * ar - m[1] * ai + m[2] * br - m[3] * bi
    p[2 * i0 + 1] = m[0] * ai + m[1] * ar + m[2] * bi + m[3] * br
    p[2 * i1] = m[4] * ar - m[5] * ai + m[6] * br - m[7] * bi
    p[2 * i1 + 1] = m[4] * ai + m[5] * ar + m[6] * bi + m[7] * br


cdef inline void _load2(const double complex[:, ::1] u, Py_ssize_t off, double* m) noexcept nogil:
    cdef int r, c
    for r in range(2):
        for c in range(2):
            m[4 * r + 2 * c] = u[off + r, c].real
            m[4 * r + 2 * c + 1] = u[off + r, c].imag


def apply_1q(double complex[:, ::1] psi, const double complex[:, ::1] u, int n, int target):
    cdef int pos = n - 1 - target
    cdef Py_ssize_t stride = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = psi.shape[1] >> 1
    cdef Py_ssize_t b, k, i0
    cdef double m[8]
    cdef double* p
    if psi.shape[0] == 0:
        return
    _load2(u, 0, m)
    with nogil:
        for b in range(psi.shape[0]):
            p = <double*>&psi[b, 0]
            for k in range(half):
                i0 = _insert_zero(k, pos)
                _mix2(p, i0, i0 | stride, m)


def apply_1q_rows(double complex[:, ::1] psi, const double complex[:, :, ::1] u, int n, int target):
    """Like apply_1q but with one 2x2 matrix per batch row."""
    cdef int pos = n - 1 - target
    cdef Py_ssize_t stride = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = psi.shape[1] >> 1
    cdef Py_ssize_t b, k, i0
    cdef int r, c
    cdef double m[8]
    cdef double* p
    if psi.shape[0] == 0:
        return
    with nogil:
        for b in range(psi.shape[0]):
            for r in range(2):
                for c in range(2):
                    m[4 * r + 2 * c] = u[b, r, c].real
                    m[4 * r + 2 * c + 1] = u[b, r, c].imag
            p = <double*>&psi[b, 0]
            for k in range(half):
                i0 = _insert_zero(k, pos)
                _mix2(p, i0, i0 | stride, m)


def apply_2q(double complex[:, ::1] psi, const double complex[:, ::1] u, int n, int q0, int q1):
    """Apply a 4x4 gate; ``q0`` is the high bit of the gate's local index."""
    cdef int p0 = n - 1 - q0
    cdef int p1 = n - 1 - q1
    cdef int lo = p0 if p0 < p1 else p1
    cdef int hi = p1 if p0 < p1 else p0
    cdef Py_ssize_t s0 = <Py_ssize_t>1 << p0
    cdef Py_ssize_t s1 = <Py_ssize_t>1 << p1
    cdef Py_ssize_t quarter = psi.shape[1] >> 2
    cdef Py_ssize_t b, k, base
    cdef Py_ssize_t idx[4]
    cdef double ar[4]
    cdef double ai[4]
    cdef double mr[4][4]
    cdef double mi[4][4]
    cdef double sr, si
    cdef int r, c
    cdef double* p
    if psi.shape[0] == 0:
        return
    for r in range(4):
        for c in range(4):
            mr[r][c] = u[r, c].real
            mi[r][c] = u[r, c].imag
    with nogil:
        for b in range(psi.shape[0]):
            p = <double*>&psi[b, 0]
            for k in range(quarter):
                base = _insert_zero(_insert_zero(k, lo), hi)
                idx[0] = base
                idx[1] = base | s1
                idx[2] = base | s0
                idx[3] = base | s0 | s1
                for r in range(4):
                    ar[r] = p[2 * idx[r]]
                    ai[r] = p[2 * idx[r] + 1]
                for r in range(4):
                    sr = 0.0
                    si = 0.0
                    for c in range(4):
                        sr = sr + mr[r][c] * ar[c] - mi[r][c] * ai[c]
                        si = si + mr[r][c] * ai[c] + mi[r][c] * ar[c]
                    p[2 * idx[r]] = sr
                    p[2 * idx[r] + 1] = si


def apply_cnot(double complex[:, ::1] psi, int n, int control, int target):
    cdef int pc = n - 1 - control
    cdef int pt = n - 1 - target
    cdef int lo = pc if pc < pt else pt
    cdef int hi = pt if pc < pt else pc
    cdef Py_ssize_t sc = <Py_ssize_t>1 << pc
    cdef Py_ssize_t st = <Py_ssize_t>1 << pt
    cdef Py_ssize_t quarter = psi.shape[1] >> 2
    cdef Py_ssize_t b, k, i10, i11
    cdef double tr, ti
    cdef double* p
    if psi.shape[0] == 0:
        return
    with nogil:
        for b in range(psi.shape[0]):
            p = <double*>&psi[b, 0]
            for k in range(quarter):
                i10 = _insert_zero(_insert_zero(k, lo), hi) | sc
                i11 = i10 | st
                tr = p[2 * i10]
                ti = p[2 * i10 + 1]
                p[2 * i10] = p[2 * i11]
                p[2 * i10 + 1] = p[2 * i11 + 1]
                p[2 * i11] = tr
                p[2 * i11 + 1] = ti
