"""Command-line interface: code construction/inspection, decoding,
Monte-Carlo sweeps, and threshold estimation.

Sweeps write a CSV plus a manifest JSON holding the full configuration;
rerunning from the manifest reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__, codes
from .channel import (CSV_FIELDS, ChannelSpec, DecoderSetup, adjudicate,
                      estimate_threshold, run_point, run_sweep, sweep_row)
from .codes import Code, color4612_n
from .decoder import (DecoderConfig, ambp4_decode, fixed_eps0_prior,
                      mbp4_decode)
from .oracle import brute_force_distance
from .pauli import pauli_from_symbols, syndrome_of
from .tanner import to_tanner

_CLI_FAMILIES = {
    "toric": "toric",
    "rotated-toric": "rotated_toric",
    "surface": "surface",
    "rotated-surface": "rotated_surface",
    "color666": "color666",
    "color488": "color488",
    "xzzx-toric": "xzzx_toric",
    "xzzx-surface": "xzzx_surface",
    "twisted-xzzx": "twisted_xzzx",
}

_D_SIZED = {"color666", "color488", "twisted_xzzx"}


def _build_from_args(args) -> Code:
    family = _CLI_FAMILIES[args.family]
    return codes.build(family, L=args.L, J=args.J, D=args.D)


def _build_sized(family: str, size: int) -> Code:
    """Sweep sizes: L for lattice families, D for distance families."""
    if family in _D_SIZED:
        return codes.build(family, D=size)
    return codes.build(family, L=size)


def _info_payload(code: Code) -> dict:
    return {
        "family": code.spec.family,
        "L": code.spec.L,
        "J": code.spec.J,
        "N": code.n,
        "K": code.k,
        "D": code.d,
        "w_avg": round(code.w_avg, 6),
        "w_max": code.w_max,
        "c": round(code.efficiency, 6),
        **code.extra,
    }


def cmd_code_info(args) -> int:
    if args.family == "color4612":
        if args.D is None:
            raise ValueError("color4612 requires --D")
        payload = {"family": "color4612", "N": color4612_n(args.D), "K": 1,
                   "D": args.D, "w_max": 12, "note":
                   "size formula only; no lattice constructor"}
        print(json.dumps(payload, indent=2))
        return 0
    code = _build_from_args(args)
    payload = _info_payload(code)
    if args.verify:
        payload["rank_ok"] = code.n - code.checks.rank() == code.k
        if code.n <= 16:
            payload["distance_checked"] = brute_force_distance(code).d
            payload["distance_ok"] = payload["distance_checked"] == code.d
        else:
            payload["distance_checked"] = None
    print(json.dumps(payload, indent=2))
    return 0


def cmd_code_export(args) -> int:
    code = _build_from_args(args)
    text = code.export_text()
    meta = json.dumps(code.metadata(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        with open(args.out + ".json", "w") as fh:
            fh.write(meta + "\n")
    else:
        sys.stdout.write(text)
        print(meta)
    return 0


def cmd_code_verify(args) -> int:
    code = _build_from_args(args)
    report = _info_payload(code)
    report["rank_ok"] = code.n - code.checks.rank() == code.k
    pairs = code.logicals()
    pairing_ok = all(
        ((a.x_bits & b.z_bits).bit_count()
         ^ (a.z_bits & b.x_bits).bit_count()) & 1 == (i == j)
        for i, (a, _) in enumerate(pairs)
        for j, (_, b) in enumerate(pairs))
    report["logicals_ok"] = pairing_ok and len(pairs) == code.k
    if code.n <= 16:
        d = brute_force_distance(code).d
        report["distance_checked"] = d
        report["distance_ok"] = d == code.d
    else:
        report["distance_checked"] = None
    print(json.dumps(report, indent=2))
    bad = [k for k in ("rank_ok", "logicals_ok", "distance_ok")
           if report.get(k) is False]
    return 1 if bad else 0


def _decoder_setup(args) -> DecoderSetup:
    kw = dict(kind=args.decoder, max_iters=args.tmax, clamp=args.clamp,
              eps0=args.eps0)
    if args.decoder in ("mbp4", "bp4"):
        kw["alpha"] = args.alpha
    else:
        kw.update(alpha_start=args.alpha_start, alpha_stop=args.alpha_stop,
                  alpha_step=args.alpha_step)
    return DecoderSetup(**kw)


def cmd_decode(args) -> int:
    if (args.error is None) == (args.syndrome is None):
        raise ValueError("give exactly one of --error or --syndrome")
    code = _build_from_args(args)
    graph = to_tanner(code.checks)
    setup = _decoder_setup(args)
    if setup.eps0 is not None:
        prior = fixed_eps0_prior(code.n, setup.eps0)
    else:
        prior = np.tile(ChannelSpec.depolarizing(args.eps).probs(),
                        (code.n, 1))
    if args.error is not None:
        error = pauli_from_symbols(args.error)
        if error.n_qubits != code.n:
            raise ValueError(
                f"error length {error.n_qubits} differs from N={code.n}")
        syndrome = syndrome_of(code.checks, error)
    else:
        syndrome = np.array([int(b) for b in args.syndrome], dtype=np.uint8)
        if syndrome.size != code.checks.m or \
                any(b not in "01" for b in args.syndrome):
            raise ValueError(
                f"syndrome must be {code.checks.m} bits of 0/1")
        error = None
    if setup.kind == "ambp4":
        result = ambp4_decode(graph, syndrome, prior,
                              setup.alpha_sequence(), setup.max_iters,
                              setup.clamp)
    else:
        cfg = DecoderConfig(alpha=setup.alpha, max_iters=setup.max_iters,
                            variant=setup.kind, clamp=setup.clamp)
        result = mbp4_decode(graph, syndrome, prior, cfg)
    payload = {
        "family": code.spec.family,
        "N": code.n,
        "syndrome": "".join(str(int(b)) for b in syndrome),
        "estimate": str(result.estimate),
        "converged": result.converged,
        "iterations": result.iterations,
        "alpha_used": result.alpha_used,
    }
    if error is not None:
        payload["error"] = str(error)
        payload["adjudication"] = adjudicate(code, error, result)
    print(json.dumps(payload, indent=2))
    return 0


def _eps_grid(start: float, stop: float, step: float) -> list[float]:
    if stop < start or step <= 0:
        raise ValueError("need eps-start <= eps-stop and eps-step > 0")
    count = int(round((stop - start) / step)) + 1
    grid = [round(start + i * step, 10) for i in range(count)]
    return [e for e in grid if e <= stop + 1e-12]


def _manifest_from_args(args) -> dict:
    return {
        "tool": "topoqec",
        "version": __version__,
        "families": args.families,
        "sizes": args.sizes,
        "eps_start": args.eps_start,
        "eps_stop": args.eps_stop,
        "eps_step": args.eps_step,
        "decoder": args.decoder,
        "alpha": args.alpha,
        "alpha_start": args.alpha_start,
        "alpha_stop": args.alpha_stop,
        "alpha_step": args.alpha_step,
        "eps0": args.eps0,
        "max_iters": args.tmax,
        "clamp": args.clamp,
        "target_errors": args.target_errors,
        "max_trials": args.max_trials,
        "seed": args.seed,
        "threads": args.threads,
        "out": args.out,
    }


def _sweep_from_manifest(manifest: dict, out: str, threads: int | None) -> int:
    families = [_CLI_FAMILIES[f] for f in manifest["families"]]
    sizes = manifest["sizes"]
    code_list = [_build_sized(f, s) for f in families for s in sizes]
    grid = _eps_grid(manifest["eps_start"], manifest["eps_stop"],
                     manifest["eps_step"])
    kw = dict(kind=manifest["decoder"], max_iters=manifest["max_iters"],
              clamp=manifest["clamp"], eps0=manifest["eps0"])
    if manifest["decoder"] in ("mbp4", "bp4"):
        kw["alpha"] = manifest["alpha"]
    else:
        kw.update(alpha_start=manifest["alpha_start"],
                  alpha_stop=manifest["alpha_stop"],
                  alpha_step=manifest["alpha_step"])
    setup = DecoderSetup(**kw)
    rows = run_sweep(code_list, grid, setup,
                     target_errors=manifest["target_errors"],
                     max_trials=manifest["max_trials"],
                     seed=manifest["seed"],
                     threads=threads if threads is not None
                     else manifest["threads"])
    _write_csv(out, rows)
    with open(out + ".manifest.json", "w") as fh:
        json.dump({**manifest, "out": out}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def cmd_sweep(args) -> int:
    if args.manifest:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        out = args.out or manifest["out"]
        return _sweep_from_manifest(manifest, out, args.threads)
    if not args.families or not args.sizes:
        raise ValueError("sweep needs --families and --sizes")
    if not args.out:
        raise ValueError("sweep needs --out")
    for f in args.families:
        if f not in _CLI_FAMILIES:
            raise ValueError(f"unknown family {f!r}")
    manifest = _manifest_from_args(args)
    return _sweep_from_manifest(manifest, args.out, None)


def cmd_threshold(args) -> int:
    with open(getattr(args, "in")) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError("empty CSV")
    missing = {"family", "D", "eps", "p_L"} - set(rows[0])
    if missing:
        raise ValueError(f"CSV lacks columns: {sorted(missing)}")
    if args.family:
        rows = [r for r in rows if r["family"] == _CLI_FAMILIES[args.family]]
    families = sorted({r["family"] for r in rows})
    if len(families) > 1:
        raise ValueError(
            f"CSV mixes families {families}; select one with --family")
    report = estimate_threshold(rows)
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _add_family_args(p: argparse.ArgumentParser, with_4612: bool = False):
    choices = list(_CLI_FAMILIES)
    if with_4612:
        choices.append("color4612")
    p.add_argument("--family", required=True, choices=choices)
    p.add_argument("--L", type=int)
    p.add_argument("--J", type=int)
    p.add_argument("--D", type=int)


def _add_decoder_args(p: argparse.ArgumentParser):
    p.add_argument("--decoder", choices=["bp4", "mbp4", "ambp4"],
                   default="ambp4")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="fixed alpha for bp4/mbp4")
    p.add_argument("--alpha-start", type=float, default=1.0)
    p.add_argument("--alpha-stop", type=float, default=0.5)
    p.add_argument("--alpha-step", type=float, default=0.01)
    p.add_argument("--tmax", type=int, default=100)
    p.add_argument("--clamp", type=float, default=30.0)
    p.add_argument("--eps0", type=float, default=None,
                   help="fixed depolarizing rate for the decoder prior")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoqec",
        description="2D topological codes with MBP4/AMBP4 decoding")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    code_p = sub.add_parser("code", help="construct and inspect codes")
    code_sub = code_p.add_subparsers(dest="subcommand", required=True)

    p = code_sub.add_parser("info", help="report [[N,K,D]], weights, c")
    _add_family_args(p, with_4612=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_code_info)

    p = code_sub.add_parser("export", help="write Pauli text + metadata")
    _add_family_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_code_export)

    p = code_sub.add_parser("verify", help="rank/logical/distance checks")
    _add_family_args(p)
    p.set_defaults(func=cmd_code_verify)

    p = sub.add_parser("decode", help="decode one error or syndrome")
    _add_family_args(p)
    p.add_argument("--error", help="Pauli string over IXYZ")
    p.add_argument("--syndrome", help="bit string, one per check row")
    p.add_argument("--eps", type=float, default=0.1,
                   help="depolarizing rate for the decoder prior")
    _add_decoder_args(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV + manifest")
    p.add_argument("--families", nargs="+", choices=list(_CLI_FAMILIES))
    p.add_argument("--sizes", type=int, nargs="+",
                   help="L for lattice families, D for color/twisted")
    p.add_argument("--eps-start", type=float, default=0.14)
    p.add_argument("--eps-stop", type=float, default=0.20)
    p.add_argument("--eps-step", type=float, default=0.005)
    _add_decoder_args(p)
    p.add_argument("--target-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--manifest", help="rerun from a manifest JSON")
    p.set_defaults(func=cmd_sweep, threads_default=1)

    p = sub.add_parser("threshold", help="crossings from a sweep CSV")
    p.add_argument("--in", dest="in", required=True)
    p.add_argument("--out")
    p.add_argument("--family", choices=list(_CLI_FAMILIES))
    p.set_defaults(func=cmd_threshold)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "sweep" and args.threads is None \
            and not args.manifest:
        args.threads = 1
    try:
        return args.func(args)
    except (ValueError, OSError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
