"""Pauli-string algebra in the binary symplectic representation.

Phases are discarded throughout: products, syndromes, and membership in
the stabilizer group only depend on the (x|z) bit pattern, so a Pauli on
N qubits is stored as two N-bit ints. Qubit 0 is bit 0.

Single-qubit Paulis are also handled as small integer codes
(0=I, 1=X, 2=Y, 3=Z) where numpy arrays are more convenient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2

PAULI_CHARS = "IXYZ"

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _parity(v: int) -> int:
    return v.bit_count() & 1


@dataclass(frozen=True)
class PauliString:
    """N-qubit Pauli operator, phase ignored."""

    n_qubits: int
    x_bits: int
    z_bits: int

    def __post_init__(self) -> None:
        if self.n_qubits <= 0:
            raise ValueError("PauliString needs at least one qubit")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bit-vector longer than n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_codes(cls, codes: Sequence[int] | np.ndarray) -> "PauliString":
        """Build from per-qubit codes 0=I, 1=X, 2=Y, 3=Z."""
        x = z = 0
        for q, c in enumerate(codes):
            if c in (1, 2):
                x |= 1 << q
            if c in (2, 3):
                z |= 1 << q
        return cls(len(codes), x, z)

    def code(self, q: int) -> int:
        """Pauli code on qubit q (0=I, 1=X, 2=Y, 3=Z)."""
        x = (self.x_bits >> q) & 1
        z = (self.z_bits >> q) & 1
        return x ^ (3 * z)

    def to_codes(self) -> np.ndarray:
        """Per-qubit codes as a uint8 array."""
        nbytes = (self.n_qubits + 7) // 8
        x = np.unpackbits(np.frombuffer(self.x_bits.to_bytes(nbytes, "little"),
                                        np.uint8),
                          bitorder="little")[:self.n_qubits]
        z = np.unpackbits(np.frombuffer(self.z_bits.to_bytes(nbytes, "little"),
                                        np.uint8),
                          bitorder="little")[:self.n_qubits]
        return (x ^ (3 * z)).astype(np.uint8)

    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def symplectic_int(self) -> int:
        """Concatenated (x|z) vector: x in bits [0,N), z in bits [N,2N)."""
        return self.x_bits | (self.z_bits << self.n_qubits)

    @classmethod
    def from_symplectic_int(cls, vec: int, n_qubits: int) -> "PauliString":
        mask = (1 << n_qubits) - 1
        return cls(n_qubits, vec & mask, vec >> n_qubits)

    def __str__(self) -> str:
        return "".join(PAULI_CHARS[self.code(q)] for q in range(self.n_qubits))

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)


def pauli_from_symbols(text: str) -> PauliString:
    """Parse a string over {I, X, Y, Z} into a PauliString."""
    if not text:
        raise ValueError("empty Pauli string")
    x = z = 0
    for q, ch in enumerate(text):
        try:
            xb, zb = _CHAR_TO_XZ[ch]
        except KeyError:
            raise ValueError(f"invalid Pauli symbol {ch!r} at position {q}") from None
        x |= xb << q
        z |= zb << q
    return PauliString(len(text), x, z)


def _check_lengths(p: PauliString, q: PauliString) -> None:
    if p.n_qubits != q.n_qubits:
        raise ValueError(f"length mismatch: {p.n_qubits} vs {q.n_qubits}")


def symplectic_product(p: PauliString, q: PauliString) -> int:
    """0 if p and q commute, 1 if they anticommute."""
    _check_lengths(p, q)
    return _parity(p.x_bits & q.z_bits) ^ _parity(p.z_bits & q.x_bits)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Phaseless product: bitwise XOR of the symplectic vectors."""
    _check_lengths(p, q)
    return PauliString(p.n_qubits, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits)


@dataclass(frozen=True)
class CheckMatrix:
    """Measured stabilizers of a code, one PauliString per row.

    Rows must pairwise commute and contain no all-identity row; this is
    enforced at construction.
    """

    rows: tuple[PauliString, ...]
    n_qubits: int

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("CheckMatrix needs at least one row")
        for r in self.rows:
            if r.n_qubits != self.n_qubits:
                raise ValueError("row length differs from n_qubits")
            if r.x_bits == 0 and r.z_bits == 0:
                raise ValueError("all-identity check row")
        for i in range(len(self.rows)):
            for j in range(i + 1, len(self.rows)):
                if symplectic_product(self.rows[i], self.rows[j]):
                    raise ValueError(f"check rows {i} and {j} anticommute")

    @classmethod
    def from_paulis(cls, rows: Iterable[PauliString]) -> "CheckMatrix":
        rows = tuple(rows)
        if not rows:
            raise ValueError("CheckMatrix needs at least one row")
        return cls(rows, rows[0].n_qubits)

    @property
    def m(self) -> int:
        return len(self.rows)

    def symplectic_ints(self) -> list[int]:
        return [r.symplectic_int() for r in self.rows]

    def rank(self) -> int:
        return gf2.rank(self.symplectic_ints())

    def rowspace_basis(self) -> dict[int, int]:
        return gf2.span_basis(self.symplectic_ints())

    def to_code_array(self) -> np.ndarray:
        """Dense (M, N) array of Pauli codes."""
        return np.stack([r.to_codes() for r in self.rows])


def syndrome_of(checks: CheckMatrix, error: PauliString) -> np.ndarray:
    """Syndrome bits, one per measured row."""
    if error.n_qubits != checks.n_qubits:
        raise ValueError("error length differs from check matrix")
    return np.array(
        [symplectic_product(row, error) for row in checks.rows], dtype=np.uint8
    )


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank of a list of bit-vectors over GF(2)."""
    return gf2.rank(vectors)


def in_rowspace(checks: CheckMatrix, candidate: PauliString) -> bool:
    """Whether candidate lies in the GF(2) span of the check rows."""
    if candidate.n_qubits != checks.n_qubits:
        raise ValueError("candidate length differs from check matrix")
    return gf2.in_span(checks.rowspace_basis(), candidate.symplectic_int())


def _symp_int_product(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    ax, az = a & mask, a >> n
    bx, bz = b & mask, b >> n
    return _parity(ax & bz) ^ _parity(az & bx)


def logical_operators(checks: CheckMatrix) -> list[tuple[PauliString, PauliString]]:
    """K anticommuting logical pairs (X̄_k, Z̄_k) for the code.

    Each output commutes with every check row and with every operator of
    the other pairs, is outside the check rowspace, and pairs satisfy
    symplectic_product(X̄_k, Z̄_k) = 1. Found by symplectic Gram-Schmidt
    on a basis of the commutation kernel taken modulo the rowspace.
    """
    n = checks.n_qubits
    stab = checks.symplectic_ints()
    mask = (1 << n) - 1
    # Commuting with (x|z) is a parity constraint against the twisted row (z|x).
    twisted = [(s >> n) | ((s & mask) << n) for s in stab]
    kernel = gf2.nullspace(twisted, 2 * n)

    basis = gf2.span_basis(stab)
    k = n - len(basis)
    candidates = [v for v in kernel if gf2.echelon_insert(basis, v)]
    if len(candidates) != 2 * k:
        raise ValueError("inconsistent check matrix: kernel/rowspace dimensions")

    pairs: list[tuple[int, int]] = []
    while candidates:
        a = candidates.pop(0)
        j = next(
            (i for i, b in enumerate(candidates) if _symp_int_product(a, b, n)), None
        )
        if j is None:
            raise ValueError("degenerate symplectic form on the logical quotient")
        b = candidates.pop(j)
        candidates = [
            c
            ^ (a if _symp_int_product(c, b, n) else 0)
            ^ (b if _symp_int_product(c, a, n) else 0)
            for c in candidates
        ]
        pairs.append((a, b))

    return [
        (
            PauliString.from_symplectic_int(a, n),
            PauliString.from_symplectic_int(b, n),
        )
        for a, b in pairs
    ]


def write_pauli_text(checks: CheckMatrix) -> str:
    """Serialize as 'M N' header plus one row string per line."""
    lines = [f"{checks.m} {checks.n_qubits}"]
    lines.extend(str(r) for r in checks.rows)
    return "\n".join(lines) + "\n"


def parse_pauli_text(text: str) -> CheckMatrix:
    """Parse the 'M N' header format written by write_pauli_text."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty check matrix text")
    try:
        m, n = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ValueError(f"malformed header line {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        row = pauli_from_symbols(ln)
        if row.n_qubits != n:
            raise ValueError(f"row length {row.n_qubits} differs from header N={n}")
        rows.append(row)
    return CheckMatrix(tuple(rows), n)
