"""Small-instance ground truth: brute-force distance and exhaustive
(degenerate) maximum-likelihood decoding.

Enumerations are vectorized over numpy bit planes; budgets are enforced
up front so a misuse fails fast instead of grinding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf2
from .codes import Code
from .pauli import PauliString

_MAX_N_DISTANCE = 20
_MAX_W = 6
_MAX_N_COSET = 10
_MAX_N_MINWEIGHT = 20


@dataclass(frozen=True)
class DistanceReport:
    d: int
    witness: PauliString


def _check_bit_planes(code: Code) -> tuple[np.ndarray, np.ndarray]:
    codes = code.checks.to_code_array()
    sx = ((codes == 1) | (codes == 2)).astype(np.int64)
    sz = ((codes == 2) | (codes == 3)).astype(np.int64)
    return sx, sz


def _weight_w_candidates(n: int, w: int):
    """All weight-w Paulis as (x, z) bit-plane batches, one batch per
    support, in deterministic support-then-assignment order."""
    assigns = np.array(list(itertools.product((1, 2, 3), repeat=w)),
                       dtype=np.uint8)
    ax = ((assigns == 1) | (assigns == 2)).astype(np.int64)
    az = ((assigns == 2) | (assigns == 3)).astype(np.int64)
    for support in itertools.combinations(range(n), w):
        x = np.zeros((len(assigns), n), dtype=np.int64)
        z = np.zeros_like(x)
        x[:, support] = ax
        z[:, support] = az
        yield x, z


def _bits_to_int(bits: np.ndarray) -> int:
    out = 0
    for q in np.nonzero(bits)[0]:
        out |= 1 << int(q)
    return out


def brute_force_distance(code: Code, w_limit: int = _MAX_W) -> DistanceReport:
    """Smallest-weight Pauli commuting with all checks yet outside the
    rowspace, by exhaustive enumeration up to w_limit."""
    n = code.n
    if n > _MAX_N_DISTANCE or w_limit > _MAX_W:
        raise ValueError(
            f"enumeration budget exceeded (N={n} > {_MAX_N_DISTANCE} or "
            f"w_limit={w_limit} > {_MAX_W})")
    sx, sz = _check_bit_planes(code)
    basis = code.rowspace_basis()
    for w in range(1, w_limit + 1):
        for x, z in _weight_w_candidates(n, w):
            syndrome = (x @ sz.T + z @ sx.T) & 1
            for i in np.nonzero(~syndrome.any(axis=1))[0]:
                xv = _bits_to_int(x[i])
                zv = _bits_to_int(z[i])
                if not gf2.in_span(basis, xv | (zv << n)):
                    return DistanceReport(w, PauliString(n, xv, zv))
    raise ValueError(f"no logical operator of weight <= {w_limit} found")


def _logical_bit_planes(code: Code) -> tuple[np.ndarray, np.ndarray]:
    """Bit planes whose symplectic products with an error give its
    logical class bits, ordered X1, Z1, X2, Z2, ..."""
    ops = []
    for xbar, zbar in code.logicals():
        ops.extend([xbar, zbar])
    lx = np.zeros((len(ops), code.n), dtype=np.int64)
    lz = np.zeros_like(lx)
    for i, op in enumerate(ops):
        for q in range(code.n):
            lx[i, q] = (op.x_bits >> q) & 1
            lz[i, q] = (op.z_bits >> q) & 1
    return lx, lz


def logical_class_key(code: Code, op: PauliString) -> int:
    """Packed symplectic products of op with the logical operators."""
    key = 0
    bit = 0
    for xbar, zbar in code.logicals():
        for lop in (xbar, zbar):
            sp = ((op.x_bits & lop.z_bits).bit_count()
                  ^ (op.z_bits & lop.x_bits).bit_count()) & 1
            key |= sp << bit
            bit += 1
    return key


class CosetTables:
    """Probability of every (syndrome, logical class) pair, from full
    enumeration of the 4^N errors under a Pauli channel."""

    def __init__(self, code: Code, channel):
        n = code.n
        if n > _MAX_N_COSET:
            raise ValueError(f"coset enumeration budget exceeded (N={n})")
        self.code = code
        sx, sz = _check_bit_planes(code)
        lx, lz = _logical_bit_planes(code)
        idx = np.arange(4 ** n, dtype=np.int64)
        digits = (idx[:, None] >> (2 * np.arange(n)[None, :])) & 3
        x = ((digits == 1) | (digits == 2)).astype(np.int64)
        z = ((digits == 2) | (digits == 3)).astype(np.int64)
        syn = (x @ sz.T + z @ sx.T) & 1
        logi = (x @ lz.T + z @ lx.T) & 1
        m = syn.shape[1]
        self.m = m
        self.k2 = logi.shape[1]
        self.syn_key = syn @ (1 << np.arange(m, dtype=np.int64))
        self.log_key = logi @ (1 << np.arange(self.k2, dtype=np.int64))
        logp = np.log(np.clip(channel.probs(), 1e-300, None))
        self.prob = np.exp(logp[digits].sum(axis=1))
        key = self.syn_key * (1 << self.k2) + self.log_key
        sums = np.bincount(key, weights=self.prob,
                           minlength=(1 << m) * (1 << self.k2))
        self.table = sums.reshape(1 << m, 1 << self.k2)
        self._digits = digits

    def syndrome_key(self, syndrome) -> int:
        z = np.asarray(syndrome, dtype=np.int64)
        return int(z @ (1 << np.arange(z.size, dtype=np.int64)))

    def best_coset(self, syndrome) -> int:
        row = self.table[self.syndrome_key(syndrome)]
        if row.sum() <= 0:
            raise ValueError("no error matches the syndrome")
        return int(np.argmax(row))

    def representative(self, syndrome, coset: int) -> PauliString:
        """Highest-probability member, ties to the smallest error index."""
        zkey = self.syndrome_key(syndrome)
        members = np.nonzero((self.syn_key == zkey)
                             & (self.log_key == coset))[0]
        probs = self.prob[members]
        winner = int(members[probs == probs.max()].min())
        return PauliString.from_codes(self._digits[winner].astype(np.uint8))

    def ml_failure_rate(self) -> float:
        return float(1.0 - self.table.max(axis=1).sum())


def ml_decode(code: Code, syndrome, channel, mode: str = "coset") -> PauliString:
    """Optimal decoding oracle.

    coset mode returns a representative of the most probable logical
    coset consistent with the syndrome (degenerate ML); min_weight mode
    returns a minimum-weight consistent error.
    """
    z = np.asarray(syndrome, dtype=np.uint8)
    if z.size != code.checks.m:
        raise ValueError("syndrome length differs from check count")
    if mode == "coset":
        tables = CosetTables(code, channel)
        return tables.representative(z, tables.best_coset(z))
    if mode == "min_weight":
        return _ml_min_weight(code, z)
    raise ValueError("mode must be 'coset' or 'min_weight'")


def _ml_min_weight(code: Code, z: np.ndarray) -> PauliString:
    n = code.n
    if n > _MAX_N_MINWEIGHT:
        raise ValueError(f"min-weight enumeration budget exceeded (N={n})")
    if not z.any():
        return PauliString.identity(n)
    sx, sz = _check_bit_planes(code)
    for w in range(1, n + 1):
        for x, zb in _weight_w_candidates(n, w):
            syn = (x @ sz.T + zb @ sx.T) & 1
            hits = np.nonzero((syn == z[None, :].astype(np.int64)).all(axis=1))[0]
            if hits.size:
                i = int(hits[0])
                return PauliString(n, _bits_to_int(x[i]), _bits_to_int(zb[i]))
    raise ValueError("no error matches the syndrome (invalid checks?)")


def exact_ml_failure_rate(code: Code, channel) -> float:
    """Exact logical failure probability of the degenerate-ML decoder."""
    return CosetTables(code, channel).ml_failure_rate()


def exact_decoder_failure_rate(code: Code, channel, decode_fn) -> float:
    """Exact failure probability of an arbitrary decoder on a small code.

    decode_fn maps a syndrome array to either a PauliString or an object
    with .estimate and .converged; non-convergence counts as failure.
    """
    tables = CosetTables(code, channel)
    fail = 0.0
    for zkey in range(1 << tables.m):
        total = tables.table[zkey].sum()
        if total <= 0.0:
            continue
        z = ((zkey >> np.arange(tables.m)) & 1).astype(np.uint8)
        result = decode_fn(z)
        est = result.estimate if hasattr(result, "estimate") else result
        if not getattr(result, "converged", True):
            fail += total
            continue
        fail += total - tables.table[zkey][logical_class_key(tables.code, est)]
    return float(fail)
