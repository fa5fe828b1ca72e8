# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude kernels.

All kernels update ``amps`` in place. Amplitude index bit ``q`` is qubit
``q``. ``cmask`` selects control qubits: a group is touched only when every
control bit is set.
"""

ctypedef unsigned long long u64
ctypedef double complex cplx


cdef extern from *:
    int __builtin_parityll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil

cdef extern from "<complex.h>":
    cplx CMPLX(double, double) nogil


cdef inline int _parity(u64 v) noexcept nogil:
    return __builtin_parityll(v)


cdef inline cplx _phase(cplx a, int k) noexcept nogil:
    # a * i**k without rounding
    if k == 0:
        return a
    elif k == 1:
        return CMPLX(-a.imag, a.real)
    elif k == 2:
        return CMPLX(-a.real, -a.imag)
    return CMPLX(a.imag, -a.real)


def apply_1q(cplx[::1] amps, const cplx[:, ::1] m, int target, u64 cmask):
    cdef u64 n = amps.shape[0]
    cdef u64 half = n >> 1
    cdef u64 tbit = (<u64>1) << target
    cdef u64 low = tbit - 1
    cdef u64 k, i0, i1
    cdef cplx a0, a1
    cdef cplx m00 = m[0, 0], m01 = m[0, 1], m10 = m[1, 0], m11 = m[1, 1]
    with nogil:
        for k in range(half):
            i0 = ((k & ~low) << 1) | (k & low)
            if (i0 & cmask) != cmask:
                continue
            i1 = i0 | tbit
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1


def apply_x(cplx[::1] amps, int target, u64 cmask):
    cdef u64 n = amps.shape[0]
    cdef u64 half = n >> 1
    cdef u64 tbit = (<u64>1) << target
    cdef u64 low = tbit - 1
    cdef u64 k, i0, i1
    cdef cplx tmp
    with nogil:
        for k in range(half):
            i0 = ((k & ~low) << 1) | (k & low)
            if (i0 & cmask) != cmask:
                continue
            i1 = i0 | tbit
            tmp = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = tmp


def apply_2q(cplx[::1] amps, const cplx[:, ::1] m, int t_hi, int t_lo, u64 cmask):
    cdef u64 n = amps.shape[0]
    cdef u64 quarter = n >> 2
    cdef u64 bh = (<u64>1) << t_hi
    cdef u64 bl = (<u64>1) << t_lo
    cdef int s_lo = t_lo if t_lo < t_hi else t_hi
    cdef int s_hi = t_hi if t_lo < t_hi else t_lo
    cdef u64 low1 = ((<u64>1) << s_lo) - 1
    cdef u64 low2 = ((<u64>1) << s_hi) - 1
    cdef u64 k, base, idx[4]
    cdef cplx a[4]
    cdef int r, c
    cdef cplx acc
    with nogil:
        for k in range(quarter):
            base = ((k & ~low1) << 1) | (k & low1)
            base = ((base & ~low2) << 1) | (base & low2)
            if (base & cmask) != cmask:
                continue
            idx[0] = base
            idx[1] = base | bl
            idx[2] = base | bh
            idx[3] = base | bh | bl
            for r in range(4):
                a[r] = amps[idx[r]]
            for r in range(4):
                acc = m[r, 0] * a[0]
                for c in range(1, 4):
                    acc = acc + m[r, c] * a[c]
                amps[idx[r]] = acc


def apply_pauli(cplx[::1] amps, u64 xmask, u64 zmask, int phase):
    cdef u64 n = amps.shape[0]
    cdef u64 i, j, hbit
    cdef cplx ai, aj
    cdef int si, sj
    phase = phase % 4
    with nogil:
        if xmask == 0:
            for i in range(n):
                si = 2 * _parity(i & zmask)
                amps[i] = _phase(amps[i], (phase + si) % 4)
        else:
            hbit = (<u64>1) << (63 - __builtin_clzll(xmask))
            for i in range(n):
                if i & hbit:
                    continue
                j = i ^ xmask
                ai = amps[i]
                aj = amps[j]
                si = 2 * _parity(i & zmask)
                sj = 2 * _parity(j & zmask)
                amps[j] = _phase(ai, (phase + si) % 4)
                amps[i] = _phase(aj, (phase + sj) % 4)


def apply_parity_phase(cplx[::1] amps, u64 mask_a, u64 mask_b):
    cdef u64 n = amps.shape[0]
    cdef u64 i
    with nogil:
        for i in range(n):
            if _parity(i & mask_a) and _parity(i & mask_b):
                amps[i] = CMPLX(-amps[i].real, -amps[i].imag)
