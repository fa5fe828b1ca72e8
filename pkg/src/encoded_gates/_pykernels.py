"""Pure numpy fallback for the amplitude kernels in ``_ckernels.pyx``.

Same signatures, same in-place semantics and the same floating-point
expression order, so both backends agree bit for bit.
"""

from __future__ import annotations

import numpy as np


def _view(amps: np.ndarray) -> np.ndarray:
    n = amps.shape[0].bit_length() - 1
    return amps.reshape((2,) * n) if n else amps.reshape(1)


def _index(num_qubits: int, fixed: dict[int, int]) -> tuple:
    # axis 0 of the C-ordered tensor is the most significant qubit
    idx: list = [slice(None)] * num_qubits
    for q, v in fixed.items():
        idx[num_qubits - 1 - q] = v
    return tuple(idx)


def _bits(mask: int) -> list[int]:
    out = []
    q = 0
    while mask:
        if mask & 1:
            out.append(q)
        mask >>= 1
        q += 1
    return out


def _mul(c: complex, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # numpy's SIMD complex multiply may fuse into FMA; real ops do not
    return c.real * a.real - c.imag * a.imag, c.real * a.imag + c.imag * a.real


def _row(coeffs, parts: list[np.ndarray]) -> np.ndarray:
    re, im = _mul(complex(coeffs[0]), parts[0])
    for c, a in zip(coeffs[1:], parts[1:]):
        r, i = _mul(complex(c), a)
        re = re + r
        im = im + i
    return _pack(re, im)


def apply_1q(amps: np.ndarray, m: np.ndarray, target: int, cmask: int) -> None:
    psi = _view(amps)
    n = psi.ndim
    ctrl = {c: 1 for c in _bits(cmask)}
    i0 = _index(n, {**ctrl, target: 0})
    i1 = _index(n, {**ctrl, target: 1})
    a = [psi[i0].copy(), psi[i1].copy()]
    psi[i0] = _row(m[0], a)
    psi[i1] = _row(m[1], a)


def apply_x(amps: np.ndarray, target: int, cmask: int) -> None:
    psi = _view(amps)
    n = psi.ndim
    ctrl = {c: 1 for c in _bits(cmask)}
    i0 = _index(n, {**ctrl, target: 0})
    i1 = _index(n, {**ctrl, target: 1})
    tmp = psi[i0].copy()
    psi[i0] = psi[i1]
    psi[i1] = tmp


def apply_2q(amps: np.ndarray, m: np.ndarray, t_hi: int, t_lo: int, cmask: int) -> None:
    psi = _view(amps)
    n = psi.ndim
    ctrl = {c: 1 for c in _bits(cmask)}
    idx = [_index(n, {**ctrl, t_hi: r >> 1, t_lo: r & 1}) for r in range(4)]
    a = [psi[i].copy() for i in idx]
    for r in range(4):
        psi[idx[r]] = _row(m[r], a)


def _parity(mask: int, size: int) -> np.ndarray:
    index = np.arange(size, dtype=np.uint64)
    return (np.bitwise_count(index & np.uint64(mask)) & 1).astype(bool)


def _times_i_power(a: np.ndarray, k: np.ndarray | int) -> np.ndarray:
    k = np.asarray(k) % 4
    re, im = a.real, a.imag
    out_re = np.where(k == 0, re, np.where(k == 1, -im, np.where(k == 2, -re, im)))
    out_im = np.where(k == 0, im, np.where(k == 1, re, np.where(k == 2, -im, -re)))
    return _pack(out_re, out_im)


def _pack(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    out = np.empty(re.shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def apply_pauli(amps: np.ndarray, xmask: int, zmask: int, phase: int) -> None:
    size = amps.shape[0]
    k = phase % 4 + 2 * _parity(zmask, size).astype(np.int64)
    moved = _times_i_power(amps, k)
    if xmask:
        index = np.arange(size, dtype=np.uint64)
        amps[index ^ np.uint64(xmask)] = moved
    else:
        amps[:] = moved


def apply_parity_phase(amps: np.ndarray, mask_a: int, mask_b: int) -> None:
    size = amps.shape[0]
    flip = _parity(mask_a, size) & _parity(mask_b, size)
    amps[flip] = -amps[flip]
