"""Quaternary belief propagation with memory effects (MBP4 / AMBP4).

Messages live in the log domain. For each edge (m, n) the variable keeps
an LLR triple Gamma = (G^X, G^Y, G^Z) with G^W = ln(P[I-or-commuting]/..)
relative to W; the check sends back a scalar Delta. One iteration is

  Delta_{m->n} = (-1)^{z_m} boxplus_{n' in N(m)\\n} lambda_{S_mn'}(Gamma),
  B_n^W        = (Lam_n^W + sum_{m'} <W,S_m'n> Delta_{m'->n}) / alpha,
  Gamma_{n->m}^W = B_n^W - <W,S_mn> Delta_{m->n},

followed by the hard decision (I if all B_n^W > 0, else argmin) and the
syndrome test. At alpha = 1 this is conventional BP4; for alpha < 1 the
subtraction leaves a (1/alpha - 1) Delta residual, the memory term.

The engine is batched: rows of the message arrays are independent
decoding instances, so results are bitwise identical for any batching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString
from .tanner import TannerGraph

_W_NAMES = {"X": 0, "Y": 1, "Z": 2, 0: 0, 1: 1, 2: 2}

PRIOR_FLOOR = 1e-12


def default_alpha_sequence() -> list[float]:
    """The adaptive sweep 1.00, 0.99, ..., 0.50."""
    return [round(1.0 - 0.01 * i, 2) for i in range(51)]


@dataclass(frozen=True)
class DecoderConfig:
    alpha: float = 1.0
    max_iters: int = 100
    variant: str = "mbp4"
    schedule: str = "parallel"
    clamp: float = 30.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.variant not in ("bp4", "mbp4"):
            raise ValueError("variant must be bp4 or mbp4")
        if self.schedule != "parallel":
            raise ValueError("only the parallel (flooding) schedule exists")
        if self.variant == "bp4" and self.alpha != 1.0:
            raise ValueError("bp4 is mbp4 with alpha fixed to 1")


@dataclass(frozen=True)
class DecodeResult:
    estimate: PauliString
    converged: bool
    iterations: int
    alpha_used: float


def lambda_w(gamma, w) -> float:
    """LLR that the error at a qubit commutes with W, given the triple
    gamma = (G^X, G^Y, G^Z): ln((1 + e^-G^W) / (e^-G^U + e^-G^V))."""
    g = np.asarray(gamma, dtype=float)
    wi = _W_NAMES[w]
    u, v = (i for i in range(3) if i != wi)
    return float(np.logaddexp(0.0, -g[wi]) - np.logaddexp(-g[u], -g[v]))


def boxplus(values) -> float:
    """Check-node combination 2*atanh(prod tanh(v/2))."""
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise ValueError("boxplus of an empty list")
    return float(2.0 * np.arctanh(np.prod(np.tanh(vals / 2.0))))


def fixed_eps0_prior(n_qubits: int, eps0: float) -> np.ndarray:
    """Uniform depolarizing prior (1-e, e/3, e/3, e/3) on every qubit."""
    if not 0.0 < eps0 < 1.0:
        raise ValueError("eps0 must be in (0, 1)")
    row = np.array([1.0 - eps0, eps0 / 3.0, eps0 / 3.0, eps0 / 3.0])
    return np.tile(row, (n_qubits, 1))


def prior_llr(prior: np.ndarray) -> np.ndarray:
    """Per-qubit LLR triple Lam^W = ln(p_I / p_W), probabilities floored
    away from zero."""
    p = np.asarray(prior, dtype=float)
    if p.ndim != 2 or p.shape[1] != 4:
        raise ValueError("prior must be an (N, 4) array")
    if np.any(p < 0) or not np.allclose(p.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError("prior rows must be distributions")
    p = np.clip(p, PRIOR_FLOOR, None)
    p = p / p.sum(axis=1, keepdims=True)
    return np.log(p[:, :1]) - np.log(p[:, 1:])


class Mbp4Engine:
    """Vectorized MBP4 message passing over one Tanner graph.

    Batch rows are independent instances; converged rows drop out of the
    working set, which never changes the remaining rows' arithmetic.
    """

    def __init__(self, graph: TannerGraph):
        self.graph = graph
        e_ids = np.arange(graph.n_edges)
        self._ar = e_ids
        lab = graph.edge_label.astype(np.int64)
        self._wsel = lab - 1
        others = np.array([[1, 2], [0, 2], [0, 1]])
        self._usel = others[self._wsel, 0]
        self._vsel = others[self._wsel, 1]
        # anti[e, w] = 1 when Pauli (w+1) anticommutes with the edge label
        self._anti = (np.arange(1, 4)[None, :] != lab[:, None]).astype(float)
        # anti4[c, e] for estimate codes 0..3 (identity commutes)
        anti4 = np.zeros((4, graph.n_edges))
        anti4[1:, :] = self._anti.T
        self._anti4 = anti4
        self._chk_flat = graph.check_pad[graph.check_mask]
        # by-qubit contiguous layout for segment sums in the variable pass
        order = np.argsort(graph.edge_qubit, kind="stable")
        self._by_qubit = order
        counts = np.bincount(graph.edge_qubit, minlength=graph.n)
        if counts.min() < 1:
            raise ValueError("every qubit must appear in at least one check")
        self._qubit_starts = np.concatenate(
            ([0], np.cumsum(counts)[:-1])).astype(np.int64)

    def decode_batch(self, syndromes: np.ndarray, prior: np.ndarray,
                     config: DecoderConfig, trace: list | None = None):
        """Decode a (B, M) batch of syndromes under one prior and config.

        Returns (estimates (B, N) Pauli codes, converged (B,), iterations
        (B,)). `trace` (B = 1 only) collects per-iteration message arrays.
        """
        syndromes = self._as_batch(syndromes)
        if trace is not None and syndromes.shape[0] != 1:
            raise ValueError("trace capture only supports a single instance")
        lam0 = self._lam0(prior)
        inv_alpha = np.full(syndromes.shape[0], 1.0 / config.alpha)
        return self._run(syndromes, lam0, inv_alpha, config.max_iters,
                         config.clamp, trace)

    def ambp_batch(self, syndromes: np.ndarray, prior: np.ndarray,
                   alphas, max_iters: int = 100, clamp: float = 30.0):
        """Adaptive sweep: run MBP4 per alpha in descending order and keep
        each instance's first convergent result.

        The rungs below the first are mutually independent, so all
        (instance, alpha) pairs run as one batch; results are identical to
        running the sweep sequentially per instance.

        Returns (estimates, converged, iterations, alpha_used).
        """
        alphas = list(alphas)
        if not alphas:
            raise ValueError("alpha sequence is empty")
        if any(a2 >= a1 for a1, a2 in zip(alphas, alphas[1:])):
            raise ValueError("alpha sequence must be strictly descending")
        syndromes = self._as_batch(syndromes)
        batch = syndromes.shape[0]
        lam0 = self._lam0(prior)

        est, converged, iters = self._run(
            syndromes, lam0, np.full(batch, 1.0 / alphas[0]), max_iters, clamp)
        alpha_used = np.full(batch, alphas[0], dtype=float)
        misses = np.nonzero(~converged)[0]
        rest = alphas[1:]
        if misses.size == 0 or not rest:
            return est, converged, iters, alpha_used

        # Remaining rungs run in groups: within a group every (instance,
        # alpha) pair decodes as one batch row, and instances that converge
        # anywhere in the group stop before the next one. Results equal the
        # purely sequential sweep because the rungs are independent.
        group_size = 8
        for glo in range(0, len(rest), group_size):
            group = rest[glo:glo + group_size]
            n_rungs = len(group)
            rep_syn = np.repeat(syndromes[misses], n_rungs, axis=0)
            rep_inv = np.tile(1.0 / np.asarray(group, dtype=float),
                              misses.size)
            e2, c2, it2 = self._run(rep_syn, lam0, rep_inv, max_iters, clamp)
            c2 = c2.reshape(misses.size, n_rungs)
            it2 = it2.reshape(misses.size, n_rungs)
            e2 = e2.reshape(misses.size, n_rungs, -1)
            last_group = glo + group_size >= len(rest)
            hit = c2.any(axis=1)
            first = np.where(hit, c2.argmax(axis=1), n_rungs - 1)
            rows = np.arange(misses.size)
            take = hit if not last_group else np.ones_like(hit)
            sel = misses[take]
            est[sel] = e2[rows[take], first[take]]
            converged[sel] = c2[rows[take], first[take]]
            iters[sel] = it2[rows[take], first[take]]
            alpha_used[sel] = np.asarray(group)[first[take]]
            misses = misses[~hit]
            if misses.size == 0:
                break
        return est, converged, iters, alpha_used

    def _as_batch(self, syndromes) -> np.ndarray:
        syndromes = np.asarray(syndromes, dtype=np.uint8)
        if syndromes.ndim == 1:
            syndromes = syndromes[None, :]
        if syndromes.shape[1] != self.graph.m:
            raise ValueError("syndrome length differs from check count")
        return syndromes

    def _lam0(self, prior: np.ndarray) -> np.ndarray:
        lam0 = prior_llr(prior)
        if lam0.shape[0] != self.graph.n:
            raise ValueError("prior length differs from qubit count")
        return lam0

    def _run(self, syndromes: np.ndarray, lam0: np.ndarray,
             inv_alpha: np.ndarray, max_iters: int, clamp: float,
             trace: list | None = None):
        g = self.graph
        batch = syndromes.shape[0]
        dtype = np.float32
        lam0 = lam0.astype(dtype)
        gamma = np.broadcast_to(
            lam0[g.edge_qubit], (batch, g.n_edges, 3)).copy()
        sgn_e = (1.0 - 2.0 * syndromes.astype(dtype))[:, g.edge_check]
        inv_a = inv_alpha.astype(dtype)[:, None, None]

        est = np.zeros((batch, g.n), dtype=np.uint8)
        converged = np.zeros(batch, dtype=bool)
        iters = np.full(batch, max_iters, dtype=np.int64)
        idx = np.arange(batch)
        syn_act = syndromes
        # Brent cycle detection: when the message state exactly revisits the
        # anchor, the trajectory is periodic with period t - anchor_t; the
        # state at max_iters is then (max_iters - t) mod period steps ahead,
        # so the row runs just that many more iterations and stops with the
        # same outcome the full loop would produce.
        anchor = gamma.copy()
        anchor_t = np.zeros(batch, dtype=np.int64)
        countdown = np.full(batch, -1, dtype=np.int64)

        for t in range(1, max_iters + 1):
            gw = gamma[:, self._ar, self._wsel]
            gu = gamma[:, self._ar, self._usel]
            gv = gamma[:, self._ar, self._vsel]
            lam = np.logaddexp(0.0, -gw) - np.logaddexp(-gu, -gv)

            tanh_half = np.tanh(lam / 2.0)
            padv = np.where(g.check_mask[None], tanh_half[:, g.check_pad],
                            dtype(1.0))
            prefix = np.ones_like(padv)
            prefix[:, :, 1:] = np.cumprod(padv[:, :, :-1], axis=2)
            rev_incl = np.cumprod(padv[:, :, ::-1], axis=2)[:, :, ::-1]
            suffix = np.ones_like(padv)
            suffix[:, :, :-1] = rev_incl[:, :, 1:]
            excl = np.empty_like(lam)
            excl[:, self._chk_flat] = (prefix * suffix)[:, g.check_mask]
            with np.errstate(divide="ignore"):
                delta = np.clip(sgn_e * 2.0 * np.arctanh(excl),
                                dtype(-clamp), dtype(clamp))

            contrib = delta[:, :, None] * self._anti[None]
            sums = np.add.reduceat(contrib[:, self._by_qubit, :],
                                   self._qubit_starts, axis=1)
            beliefs = inv_a * (lam0[None] + sums)

            gamma_new = np.clip(
                beliefs[:, g.edge_qubit, :]
                - self._anti[None] * delta[:, :, None],
                dtype(-clamp), dtype(clamp))

            mins = beliefs.min(axis=2)
            hard = np.where(mins > 0.0, 0,
                            beliefs.argmin(axis=2) + 1).astype(np.uint8)
            if trace is not None:
                trace.append({"gamma": gamma_new.copy(),
                              "delta": delta.copy(),
                              "beliefs": beliefs.copy(),
                              "estimate": hard.copy()})

            bits = self._anti4[hard[:, g.edge_qubit], self._ar]
            spad = np.where(g.check_mask[None], bits[:, g.check_pad], 0.0)
            parity = spad.sum(axis=2).astype(np.int64) & 1
            ok = (parity == syn_act).all(axis=1)

            ticking = countdown >= 0
            countdown[ticking] -= 1
            if t < max_iters:
                fresh = ~ticking & ~ok
                if fresh.any():
                    cyc = fresh & (gamma_new == anchor).all(axis=(1, 2))
                    if cyc.any():
                        period = t - anchor_t[cyc]
                        countdown[cyc] = (max_iters - t) % period
            stuck = (countdown == 0) & ~ok

            done = t == max_iters
            if ok.any() or stuck.any() or done:
                est[idx[ok]] = hard[ok]
                converged[idx[ok]] = True
                iters[idx[ok]] = t
                est[idx[stuck]] = hard[stuck]
                if done:
                    rest = ~ok
                    est[idx[rest]] = hard[rest]
                    break
                keep = ~(ok | stuck)
                if not keep.any():
                    break
                idx = idx[keep]
                gamma = gamma_new[keep]
                sgn_e = sgn_e[keep]
                syn_act = syn_act[keep]
                inv_a = inv_a[keep]
                anchor = anchor[keep]
                anchor_t = anchor_t[keep]
                countdown = countdown[keep]
            else:
                gamma = gamma_new
            if t & (t - 1) == 0:  # powers of two: move the Brent anchor
                fresh = countdown < 0
                anchor[fresh] = gamma[fresh]
                anchor_t[fresh] = t
        return est, converged, iters


def _as_syndrome_array(syndrome) -> np.ndarray:
    return np.asarray(syndrome, dtype=np.uint8).reshape(1, -1)


def mbp4_decode(graph: TannerGraph, syndrome, prior: np.ndarray,
                config: DecoderConfig | None = None,
                trace: list | None = None) -> DecodeResult:
    """Decode one syndrome with MBP4 (or conventional BP4 at alpha=1)."""
    config = config or DecoderConfig()
    engine = Mbp4Engine(graph)
    est, conv, iters = engine.decode_batch(
        _as_syndrome_array(syndrome), prior, config, trace=trace)
    return DecodeResult(PauliString.from_codes(est[0]), bool(conv[0]),
                        int(iters[0]), config.alpha)


def ambp4_decode(graph: TannerGraph, syndrome, prior: np.ndarray,
                 alpha_sequence=None, max_iters: int = 100,
                 clamp: float = 30.0) -> DecodeResult:
    """Adaptive MBP4: first convergent alpha in the descending sequence."""
    alphas = list(alpha_sequence) if alpha_sequence is not None \
        else default_alpha_sequence()
    engine = Mbp4Engine(graph)
    est, conv, iters, used = engine.ambp_batch(
        _as_syndrome_array(syndrome), prior, alphas, max_iters, clamp)
    return DecodeResult(PauliString.from_codes(est[0]), bool(conv[0]),
                        int(iters[0]), float(used[0]))
