"""Pauli strings and their binary-symplectic form.

String convention used throughout the package: character ``p`` of a Pauli
string (or bitstring) refers to wire ``p``, and wires are listed top to
bottom, i.e. from the most significant physical qubit down to qubit 0. A
block of ``n`` qubits therefore maps string position ``p`` onto
``qubits[p]`` of the block's qubit list.

A :class:`Pauli` is stored as ``i**phase * prod_q X_q**x_q Z_q**z_q`` over
physical qubits, with ``x`` and ``z`` packed into integer bit masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

PAULI_CHARS = "IXYZ"


def wire_qubits(num_qubits: int) -> list[int]:
    """Physical qubit for each string position of a full-width string."""
    return list(range(num_qubits - 1, -1, -1))


@dataclass(frozen=True)
class Pauli:
    x: int
    z: int
    phase: int = 0  # power of i

    @classmethod
    def from_string(cls, text: str, qubits: Sequence[int] | None = None) -> "Pauli":
        text = text.strip()
        sign = 0
        if text[:1] in "+-":
            sign = 2 if text[0] == "-" else 0
            text = text[1:]
        if qubits is None:
            qubits = wire_qubits(len(text))
        if len(qubits) != len(text):
            raise ValueError(f"pauli string {text!r} does not match {len(qubits)} qubits")
        x = z = 0
        ny = 0
        for ch, q in zip(text.upper(), qubits):
            if ch not in PAULI_CHARS:
                raise ValueError(f"malformed pauli string {text!r}")
            if ch in "XY":
                x |= 1 << q
            if ch in "YZ":
                z |= 1 << q
            ny += ch == "Y"
        # Y = i X Z
        return cls(x, z, (sign + ny) % 4)

    @classmethod
    def single(cls, kind: str, qubit: int) -> "Pauli":
        return cls.from_string(kind, [qubit])

    def to_string(self, qubits: Sequence[int]) -> str:
        """Render on ``qubits``; raises if the operator has support elsewhere."""
        mask = 0
        chars = []
        for q in qubits:
            mask |= 1 << q
            xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
            chars.append("IZXY"[xb * 2 + zb])
        if (self.x | self.z) & ~mask:
            raise ValueError("pauli has support outside the given qubits")
        sign = (self.phase - self.num_y) % 4
        if sign not in (0, 2):
            raise ValueError("pauli is not hermitian")
        return ("-" if sign == 2 else "") + "".join(chars)

    @property
    def num_y(self) -> int:
        return (self.x & self.z).bit_count()

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes(self, other: "Pauli") -> bool:
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __mul__(self, other: "Pauli") -> "Pauli":
        # X^a Z^b X^c Z^d = (-1)^(b.c) X^(a+c) Z^(b+d)
        swap = (self.z & other.x).bit_count()
        return Pauli(self.x ^ other.x, self.z ^ other.z, (self.phase + other.phase + 2 * swap) % 4)

    def conj_h(self, q: int) -> "Pauli":
        xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
        x = (self.x & ~(1 << q)) | (zb << q)
        z = (self.z & ~(1 << q)) | (xb << q)
        return Pauli(x, z, (self.phase + 2 * (xb & zb)) % 4)

    def conj_cnot(self, control: int, target: int) -> "Pauli":
        x, z = self.x, self.z
        if (x >> control) & 1:
            x ^= 1 << target
        if (z >> target) & 1:
            z ^= 1 << control
        return Pauli(x, z, self.phase)

    def conj_cz(self, a: int, b: int) -> "Pauli":
        x, z = self.x, self.z
        xa, xb = (x >> a) & 1, (x >> b) & 1
        # Z_a picks up factors from X_b; reorder with X-before-Z costs a sign
        # only when both X's are present.
        z ^= (xb << a) | (xa << b)
        return Pauli(x, z, (self.phase + 2 * (xa & xb)) % 4)

    def conj_pauli(self, other: "Pauli") -> "Pauli":
        return self if self.commutes(other) else Pauli(self.x, self.z, (self.phase + 2) % 4)


def syndrome_of(error: Pauli, stabilizers: Iterable[Pauli]) -> tuple[int, ...]:
    """Eigenvalue tuple a code state acquires after ``error`` is applied."""
    return tuple(1 if error.commutes(s) else -1 for s in stabilizers)


def in_group(target: Pauli, generators: Sequence[Pauli]) -> bool:
    """True if ``target`` (including its phase) is a product of ``generators``.

    Generators must commute pairwise; GF(2) elimination on the symplectic
    vectors finds the combination, then the phase is compared.
    """
    width = max([target.x.bit_length(), target.z.bit_length()]
                + [max(g.x.bit_length(), g.z.bit_length()) for g in generators] + [1])

    def pack(p: Pauli) -> int:
        return p.x | (p.z << width)

    basis: dict[int, tuple[int, int]] = {}
    for i, g in enumerate(generators):
        v, combo = pack(g), 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, combo)
                break
            bv, bc = basis[top]
            v ^= bv
            combo ^= bc
    v, combo = pack(target), 0
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return False
        bv, bc = basis[top]
        v ^= bv
        combo ^= bc
    product = Pauli(0, 0, 0)
    for i, g in enumerate(generators):
        if (combo >> i) & 1:
            product = product * g
    return product.phase == target.phase
