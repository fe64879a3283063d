"""Tanner graph of a check matrix, laid out for the decoder's inner loop.

Edges are stored flat, sorted by (check, qubit); per-check segments are
then contiguous, and a by-qubit permutation index gives contiguous access
in the variable pass. Padded gather tables (one row per check / qubit,
masked) let the message passes run as whole-array numpy operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import CheckMatrix, PauliString


@dataclass(frozen=True)
class TannerGraph:
    m: int
    n: int
    edge_check: np.ndarray   # (E,) int32, sorted
    edge_qubit: np.ndarray   # (E,) int32
    edge_label: np.ndarray   # (E,) uint8 Pauli codes 1/2/3
    check_pad: np.ndarray    # (M, max check degree) int32 edge ids
    check_mask: np.ndarray   # (M, max check degree) bool
    qubit_pad: np.ndarray    # (N, max qubit degree) int32 edge ids
    qubit_mask: np.ndarray   # (N, max qubit degree) bool

    @property
    def n_edges(self) -> int:
        return int(self.edge_check.size)

    def check_neighbors(self, m: int) -> list[int]:
        return self.edge_qubit[self.check_pad[m][self.check_mask[m]]].tolist()

    def qubit_neighbors(self, n: int) -> list[int]:
        return self.edge_check[self.qubit_pad[n][self.qubit_mask[n]]].tolist()


def _pad_groups(keys: np.ndarray, n_groups: int) -> tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(keys, minlength=n_groups)
    width = int(counts.max()) if counts.size else 0
    pad = np.zeros((n_groups, width), dtype=np.int32)
    mask = np.zeros((n_groups, width), dtype=bool)
    slot = np.zeros(n_groups, dtype=np.int64)
    for e, g in enumerate(keys):
        pad[g, slot[g]] = e
        mask[g, slot[g]] = True
        slot[g] += 1
    return pad, mask


def to_tanner(checks: CheckMatrix) -> TannerGraph:
    """Materialize the Tanner graph: one edge per non-identity entry."""
    codes = checks.to_code_array()
    mm, nn = codes.shape
    rows, cols = np.nonzero(codes)
    order = np.lexsort((cols, rows))
    edge_check = rows[order].astype(np.int32)
    edge_qubit = cols[order].astype(np.int32)
    edge_label = codes[edge_check, edge_qubit].astype(np.uint8)
    check_pad, check_mask = _pad_groups(edge_check, mm)
    qubit_pad, qubit_mask = _pad_groups(edge_qubit, nn)
    return TannerGraph(mm, nn, edge_check, edge_qubit, edge_label,
                       check_pad, check_mask, qubit_pad, qubit_mask)


def rebuild_check_matrix(graph: TannerGraph) -> CheckMatrix:
    """Inverse of to_tanner; used to verify the round trip."""
    codes = np.zeros((graph.m, graph.n), dtype=np.uint8)
    codes[graph.edge_check, graph.edge_qubit] = graph.edge_label
    rows = tuple(PauliString.from_codes(codes[i]) for i in range(graph.m))
    return CheckMatrix(rows, graph.n)


def write_alist(graph: TannerGraph) -> str:
    """Adjacency-list text export with per-edge Pauli labels.

    Line 1: M N; line 2: max degrees; then per-check and per-qubit lines
    of neighbor:label pairs (1-based indices, labels X/Y/Z).
    """
    labels = "IXYZ"
    lines = [f"{graph.m} {graph.n}",
             f"{graph.check_mask.sum(axis=1).max()} "
             f"{graph.qubit_mask.sum(axis=1).max()}"]
    for m in range(graph.m):
        edges = graph.check_pad[m][graph.check_mask[m]]
        lines.append(" ".join(
            f"{graph.edge_qubit[e] + 1}:{labels[graph.edge_label[e]]}"
            for e in edges))
    for n in range(graph.n):
        edges = graph.qubit_pad[n][graph.qubit_mask[n]]
        lines.append(" ".join(
            f"{graph.edge_check[e] + 1}:{labels[graph.edge_label[e]]}"
            for e in edges))
    return "\n".join(lines) + "\n"
