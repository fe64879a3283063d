"""GF(2) linear algebra on int bitsets.

Vectors are Python ints; bit i is column i. Bases are kept in echelon
form as dicts keyed by pivot bit (the highest set bit of each row).
"""

from __future__ import annotations

from typing import Iterable, Sequence


def echelon_insert(basis: dict[int, int], vec: int) -> int:
    """Reduce vec against basis and insert it if independent.

    Returns the reduced vector, which is 0 exactly when vec was already
    in the span.
    """
    while vec:
        pivot = vec.bit_length() - 1
        row = basis.get(pivot)
        if row is None:
            basis[pivot] = vec
            return vec
        vec ^= row
    return 0


def span_basis(vectors: Iterable[int]) -> dict[int, int]:
    """Echelon basis of the span of the given vectors."""
    basis: dict[int, int] = {}
    for v in vectors:
        echelon_insert(basis, v)
    return basis


def rank(vectors: Iterable[int]) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    basis: dict[int, int] = {}
    return sum(1 for v in vectors if echelon_insert(basis, v))


def in_span(basis: dict[int, int], vec: int) -> bool:
    """Whether vec lies in the span represented by an echelon basis."""
    while vec:
        row = basis.get(vec.bit_length() - 1)
        if row is None:
            return False
        vec ^= row
    return True


def nullspace(rows: Sequence[int], n_cols: int) -> list[int]:
    """Basis of {v : parity(v & row) = 0 for every row}.

    Free variables are taken in ascending column order, so the result is
    deterministic for a given input order.
    """
    work = list(rows)
    pivot_cols: list[int] = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(work)) if (work[i] >> c) & 1), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and (work[i] >> c) & 1:
                work[i] ^= work[r]
        pivot_cols.append(c)
        r += 1
        if r == len(work):
            break
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(n_cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, p in enumerate(pivot_cols):
            if (work[i] >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis
