"""Pauli-channel sampling, Monte-Carlo sweeps, and threshold estimation.

Trial t of a point draws its randomness from a counter-based generator
keyed by (seed, t), so results are independent of chunking and worker
count. A point stops at the exact trial where the target logical-error
count is reached; chunks computed beyond it are discarded.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .codes import Code
from .decoder import (DecoderConfig, Mbp4Engine, default_alpha_sequence,
                      fixed_eps0_prior)
from .pauli import PauliString, multiply
from . import gf2
from .tanner import to_tanner

CHUNK_START = 256
CHUNK_MAX = 4096

SUCCESS, LOGICAL_FAILURE, CONVERGENCE_FAILURE = 0, 1, 2
_OUTCOME_NAMES = {0: "success", 1: "logical_failure", 2: "convergence_failure"}


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    eps: float = 0.0
    px: float = 0.0
    py: float = 0.0
    pz: float = 0.0

    @classmethod
    def depolarizing(cls, eps: float) -> "ChannelSpec":
        if not 0.0 <= eps < 1.0:
            raise ValueError("depolarizing rate must be in [0, 1)")
        return cls("depolarizing", eps=eps, px=eps / 3, py=eps / 3, pz=eps / 3)

    @classmethod
    def pauli(cls, px: float, py: float, pz: float) -> "ChannelSpec":
        for r in (px, py, pz):
            if not 0.0 <= r < 1.0:
                raise ValueError("Pauli rates must be in [0, 1)")
        if px + py + pz >= 1.0:
            raise ValueError("Pauli rates must sum below 1")
        return cls("pauli", eps=px + py + pz, px=px, py=py, pz=pz)

    def probs(self) -> np.ndarray:
        return np.array([1.0 - self.px - self.py - self.pz,
                         self.px, self.py, self.pz])


@dataclass(frozen=True)
class DecoderSetup:
    """Decoder choice for simulation runs (bp4, mbp4, or ambp4)."""

    kind: str = "ambp4"
    alpha: float = 1.0
    alpha_start: float = 1.0
    alpha_stop: float = 0.5
    alpha_step: float = 0.01
    max_iters: int = 100
    clamp: float = 30.0
    eps0: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("bp4", "mbp4", "ambp4"):
            raise ValueError("decoder kind must be bp4, mbp4, or ambp4")
        if self.kind == "bp4" and self.alpha != 1.0:
            raise ValueError("bp4 fixes alpha = 1")

    def alpha_sequence(self) -> list[float]:
        steps = int(round((self.alpha_start - self.alpha_stop) / self.alpha_step))
        seq = [round(self.alpha_start - i * self.alpha_step, 10)
               for i in range(steps + 1)]
        if len(seq) < 1:
            raise ValueError("empty alpha sequence")
        return seq

    def alpha_mode(self) -> str:
        if self.kind == "ambp4":
            return (f"sweep:{self.alpha_start:g}:{self.alpha_stop:g}"
                    f":{self.alpha_step:g}")
        return f"fixed:{self.alpha:g}"


@dataclass(frozen=True)
class TrialStats:
    trials: int
    logical_errors: int
    convergence_failures: int
    p_L: float
    ci: tuple[float, float]
    avg_iterations: float

    def __post_init__(self) -> None:
        assert self.logical_errors <= self.trials
        assert self.convergence_failures <= self.logical_errors


def wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if n <= 0:
        return (0.0, 1.0)
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based per-trial generator: Philox keyed by (seed, trial)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_error(n_qubits: int, channel: ChannelSpec,
                 rng: np.random.Generator) -> PauliString:
    """I.i.d. per-qubit Pauli error drawn from the channel."""
    return PauliString.from_codes(_sample_codes(n_qubits, channel, rng))


def _sample_codes(n_qubits: int, channel: ChannelSpec,
                  rng: np.random.Generator) -> np.ndarray:
    cuts = np.cumsum(channel.probs())[:3]
    return np.searchsorted(cuts, rng.random(n_qubits),
                           side="right").astype(np.uint8)


def adjudicate(code: Code, error: PauliString, result) -> str:
    """success / logical_failure / convergence_failure for one trial."""
    if error.n_qubits != code.n:
        raise ValueError("error length differs from code size")
    if not result.converged:
        return _OUTCOME_NAMES[CONVERGENCE_FAILURE]
    residual = multiply(error, result.estimate)
    ok = gf2.in_span(code.rowspace_basis(), residual.symplectic_int())
    return _OUTCOME_NAMES[SUCCESS if ok else LOGICAL_FAILURE]


class _PointEngine:
    """Samples, decodes, and adjudicates chunks of trials for one point."""

    def __init__(self, code: Code, channel: ChannelSpec, setup: DecoderSetup,
                 seed: int):
        self.code = code
        self.channel = channel
        self.setup = setup
        self.seed = seed
        self.graph = to_tanner(code.checks)
        self.engine = Mbp4Engine(self.graph)
        codes_arr = code.checks.to_code_array()
        self.sx = ((codes_arr == 1) | (codes_arr == 2)).astype(np.int64)
        self.sz = ((codes_arr == 2) | (codes_arr == 3)).astype(np.int64)
        if setup.eps0 is not None:
            self.prior = fixed_eps0_prior(code.n, setup.eps0)
        else:
            self.prior = np.tile(channel.probs(), (code.n, 1))
        self.basis = code.rowspace_basis()

    def run_chunk(self, start: int, stop: int):
        count = stop - start
        err = np.empty((count, self.code.n), dtype=np.uint8)
        for i in range(count):
            err[i] = _sample_codes(self.code.n, self.channel,
                                   trial_rng(self.seed, start + i))
        ex = ((err == 1) | (err == 2)).astype(np.int64)
        ez = ((err == 2) | (err == 3)).astype(np.int64)
        syndromes = ((ex @ self.sz.T + ez @ self.sx.T) & 1).astype(np.uint8)

        if self.setup.kind == "ambp4":
            est, conv, iters, _ = self.engine.ambp_batch(
                syndromes, self.prior, self.setup.alpha_sequence(),
                self.setup.max_iters, self.setup.clamp)
        else:
            cfg = DecoderConfig(alpha=self.setup.alpha,
                                max_iters=self.setup.max_iters,
                                variant=self.setup.kind,
                                clamp=self.setup.clamp)
            est, conv, iters = self.engine.decode_batch(
                syndromes, self.prior, cfg)

        outcomes = np.empty(count, dtype=np.uint8)
        estx = ((est == 1) | (est == 2))
        estz = ((est == 2) | (est == 3))
        for i in range(count):
            if not conv[i]:
                outcomes[i] = CONVERGENCE_FAILURE
                continue
            rx = _pack_bits(ex[i] ^ estx[i])
            rz = _pack_bits(ez[i] ^ estz[i])
            ok = gf2.in_span(self.basis, rx | (rz << self.code.n))
            outcomes[i] = SUCCESS if ok else LOGICAL_FAILURE
        return outcomes, iters.astype(np.int64)


def _pack_bits(bits: np.ndarray) -> int:
    return int.from_bytes(
        np.packbits(bits.astype(np.uint8), bitorder="little").tobytes(),
        "little")


_WORKER_ENGINE: _PointEngine | None = None


def _init_worker(code, channel, setup, seed):
    global _WORKER_ENGINE
    _WORKER_ENGINE = _PointEngine(code, channel, setup, seed)


def _worker_chunk(bounds):
    return _WORKER_ENGINE.run_chunk(*bounds)


def run_point(code: Code, channel: ChannelSpec, setup: DecoderSetup,
              target_errors: int = 100, max_trials: int = 10_000_000,
              seed: int = 0, threads: int = 1) -> TrialStats:
    """Monte-Carlo estimate of the logical error rate at one (code, eps).

    Trials run until target_errors logical errors (a non-convergent
    decode counts as one) or max_trials; the tally is truncated at the
    exact trial where the target fired, so results do not depend on
    chunking or thread count.
    """
    if target_errors < 1 or max_trials < 1:
        raise ValueError("target_errors and max_trials must be positive")
    # Fixed geometric chunk schedule: small points stop cheaply, long runs
    # amortize; the schedule never depends on outcomes, so the per-trial
    # results are identical for any thread count.
    bounds = []
    start, size = 0, CHUNK_START
    while start < max_trials:
        stop = min(start + size, max_trials)
        bounds.append((start, stop))
        start = stop
        size = min(size * 2, CHUNK_MAX)

    outcomes_parts: list[np.ndarray] = []
    iters_parts: list[np.ndarray] = []
    got = 0

    def consume(chunk_out, chunk_iters) -> bool:
        nonlocal got
        fails = np.cumsum(chunk_out != SUCCESS)
        if got + fails[-1] >= target_errors:
            cut = int(np.searchsorted(fails, target_errors - got)) + 1
            outcomes_parts.append(chunk_out[:cut])
            iters_parts.append(chunk_iters[:cut])
            got += int(fails[cut - 1])
            return True
        outcomes_parts.append(chunk_out)
        iters_parts.append(chunk_iters)
        got += int(fails[-1]) if len(fails) else 0
        return False

    if threads <= 1:
        engine = _PointEngine(code, channel, setup, seed)
        for b in bounds:
            if consume(*engine.run_chunk(*b)):
                break
    else:
        with ProcessPoolExecutor(
                max_workers=threads, initializer=_init_worker,
                initargs=(code, channel, setup, seed)) as pool:
            for result in pool.map(_worker_chunk, bounds):
                if consume(*result):
                    break

    outcomes = np.concatenate(outcomes_parts) if outcomes_parts \
        else np.empty(0, dtype=np.uint8)
    iters = np.concatenate(iters_parts) if iters_parts \
        else np.empty(0, dtype=np.int64)
    trials = int(outcomes.size)
    logical = int((outcomes != SUCCESS).sum())
    convfail = int((outcomes == CONVERGENCE_FAILURE).sum())
    p = logical / trials if trials else 0.0
    return TrialStats(trials, logical, convfail, p,
                      wilson_interval(logical, trials),
                      float(iters.mean()) if trials else 0.0)


def point_seed(master_seed: int, index: int) -> int:
    """Per-point seed derived from the sweep seed and the row index."""
    return int(np.random.SeedSequence((master_seed, index))
               .generate_state(1, np.uint64)[0])


def run_sweep(code_list, eps_grid, setup: DecoderSetup,
              target_errors: int = 100, max_trials: int = 10_000_000,
              seed: int = 0, threads: int = 1) -> list[dict]:
    """One TrialStats row per (code, eps), in deterministic order."""
    if not code_list or not len(list(eps_grid)):
        raise ValueError("sweep needs at least one code and one eps")
    eps_sorted = sorted(set(float(e) for e in eps_grid))
    rows = []
    index = 0
    for code in code_list:
        for eps in eps_sorted:
            pseed = point_seed(seed, index)
            stats = run_point(code, ChannelSpec.depolarizing(eps), setup,
                              target_errors, max_trials, pseed, threads)
            rows.append(sweep_row(code, setup, eps, stats, pseed))
            index += 1
    return rows


def sweep_row(code: Code, setup: DecoderSetup, eps: float,
              stats: TrialStats, seed: int) -> dict:
    return {
        "family": code.spec.family,
        "L": code.spec.L if code.spec.L is not None else "",
        "J": code.spec.J if code.spec.J is not None else "",
        "D": code.d,
        "N": code.n,
        "K": code.k,
        "decoder": setup.kind,
        "alpha_mode": setup.alpha_mode(),
        "eps": eps,
        "eps0": setup.eps0 if setup.eps0 is not None else "",
        "trials": stats.trials,
        "logical_errors": stats.logical_errors,
        "convergence_failures": stats.convergence_failures,
        "p_L": stats.p_L,
        "ci_low": stats.ci[0],
        "ci_high": stats.ci[1],
        "avg_iters": stats.avg_iterations,
        "seed": seed,
    }


CSV_FIELDS = ["family", "L", "J", "D", "N", "K", "decoder", "alpha_mode",
              "eps", "eps0", "trials", "logical_errors",
              "convergence_failures", "p_L", "ci_low", "ci_high",
              "avg_iters", "seed"]


def estimate_threshold(rows) -> dict:
    """Curve-intersection threshold: for each consecutive pair of sizes,
    interpolate ln p_L linearly in eps and report the crossing; the
    median of the crossings estimates the threshold."""
    by_d: dict[int, dict[float, float]] = {}
    for r in rows:
        d = int(r["D"])
        eps = float(r["eps"])
        p = float(r["p_L"])
        if p > 0.0:
            by_d.setdefault(d, {})[eps] = p
    sizes = sorted(by_d)
    if len(sizes) < 2:
        raise ValueError("threshold estimation needs at least two sizes")
    pairs = []
    crossings = []
    for d1, d2 in zip(sizes, sizes[1:]):
        shared = sorted(set(by_d[d1]) & set(by_d[d2]))
        cross = None
        if len(shared) >= 2:
            delta = [math.log(by_d[d2][e]) - math.log(by_d[d1][e])
                     for e in shared]
            cands = _zero_crossings(shared, delta)
            if cands:
                cross = cands[len(cands) // 2]
        pairs.append({"D_low": d1, "D_high": d2, "crossing": cross})
        if cross is not None:
            crossings.append(cross)
    if not crossings:
        raise ValueError("no curve crossings found in the sampled range")
    return {"pairs": pairs, "median": float(np.median(crossings))}


def _zero_crossings(xs, ys) -> list[float]:
    out = []
    for i in range(len(xs) - 1):
        y1, y2 = ys[i], ys[i + 1]
        if y1 == 0.0:
            prev = next((ys[j] for j in range(i - 1, -1, -1) if ys[j] != 0.0),
                        None)
            nxt = next((y for y in ys[i + 1:] if y != 0.0), None)
            if prev is not None and nxt is not None and prev * nxt < 0:
                out.append(xs[i])
        elif y1 * y2 < 0.0:
            out.append(xs[i] + (xs[i + 1] - xs[i]) * y1 / (y1 - y2))
    if ys and ys[-1] == 0.0:
        pass
    return out


def bdd_reference(n: int, d: int, eps: float) -> float:
    """Probability that the error weight exceeds the bounded-distance
    radius floor((d-1)/2): the BDD reference curve."""
    if d < 1 or n < d:
        raise ValueError("bdd_reference needs N >= D >= 1")
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1]")
    t = (d - 1) // 2
    ok = sum(math.comb(n, w) * eps ** w * (1 - eps) ** (n - w)
             for w in range(t + 1))
    return 1.0 - ok
