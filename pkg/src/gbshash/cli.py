"""Command-line interface: ``gbshash params|hash|bench ...``.

Exit codes: 0 success, 2 usage error, 3 precondition or validation
failure, 4 numerical-tolerance failure.
"""

import argparse
import hashlib
import os
import sys

from ._backend import BACKEND
from ._version import __version__
from .bench import (
    BenchReport,
    EnumerationCapError,
    collision_report,
    confusion_report,
    diffusion_report,
    enumerate_hashes,
    percentile_report,
    shot_budget,
)
from .fock import DEFAULT_CUTOFF, OracleCutoffError, compare_with_oracle
from .gaussian import MomentEngineError
from .hashing import BitString, HashConfig, hash_details, is_trivial_input, shot_noise_hash
from .interferometer import BOUNDARIES, TOPOLOGIES, CircuitParams, haar_overlap_test, sample_circuit

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


class ToleranceFailure(Exception):
    pass


def _flags(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _load_config(args, k=None):
    circuit = CircuitParams.load(args.circuit)
    return HashConfig(circuit, k=args.k if k is None else k, r_on=args.r_on)


def _emit(report, args, stem=None):
    report.header.setdefault("flags", {})
    report.header["flags"] = dict(report.header["flags"], **_flags(args))
    report.header.setdefault("code_version", __version__)
    if args.out:
        paths = report.write(args.out, stem)
        print(f"wrote {', '.join(paths)}", file=sys.stderr)


def cmd_params_gen(args):
    params = sample_circuit(args.n, args.depth, args.topology, args.boundary, args.seed)
    text = params.to_json()
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    print(f"{args.output}  sha256:{digest}  N={params.n_modes} depth={params.depth} layers={len(params.theta)}")


def cmd_hash(args):
    cfg = _load_config(args)
    b = BitString.from_str(args.input)
    if len(b) != cfg.n_modes:
        raise ValueError(f"input has {len(b)} bits, circuit has {cfg.n_modes} modes")
    if is_trivial_input(b):
        print("warning: all-zeros/all-ones input; exclude it in applications", file=sys.stderr)
    if args.shots is not None:
        shot_cfg = HashConfig(cfg.circuit, k=cfg.k, r_on=cfg.r_on, shots=args.shots, noise_seed=args.noise_seed)
        res = shot_noise_hash(shot_cfg, b, details=True)
        print(f"{res.output}  (shot-emulated: shots={args.shots} noise_seed={args.noise_seed})")
        if args.verbose:
            print("mu       = " + " ".join(f"{x:.10g}" for x in res.mu))
            print("sigma    = " + " ".join(f"{x:.10g}" for x in res.sigma))
            print("mu_noisy = " + " ".join(f"{x:.10g}" for x in res.mu_noisy))
            print(f"min boundary margin = {res.margin:.3e}")
        return
    res = hash_details(cfg, b)
    print(str(res.output))
    if args.verbose:
        print("mu = " + " ".join(f"{x:.17g}" for x in res.mu))
        print(f"min boundary margin = {res.margin:.3e}")


def cmd_confusion(args):
    table = enumerate_hashes(_load_config(args), force=args.force)
    rep = confusion_report(table)
    _emit(rep, args)
    print(f"confusion N={table.n_modes} k={table.k}: D={rep.D:.4f} (std {rep.D_std:.4f}) H1={rep.H1:.5f}")


def cmd_diffusion(args):
    table = enumerate_hashes(_load_config(args), force=args.force)
    rep = diffusion_report(table, args.flip_seed)
    _emit(rep, args)
    print(f"diffusion N={table.n_modes} k={table.k}: D={rep.D:.4f} (std {rep.D_std:.4f}) H1={rep.H1:.5f}")


def cmd_collision(args):
    table = enumerate_hashes(_load_config(args), force=args.force)
    rep = collision_report(table)
    _emit(rep, args)
    print(f"collision N={table.n_modes} k={table.k}: H2={rep.H2:.5f} N_bound={rep.N_bound:.6g} "
          f"distinct={rep.extra['distinct_outputs']}")


def cmd_percentiles(args):
    cfg = _load_config(args, k=0)
    if args.sample is None:
        source = enumerate_hashes(cfg, force=args.force)
    else:
        source = cfg
    rep = percentile_report(source, args.x, sample=args.sample, sample_seed=args.sample_seed)
    _emit(rep, args)
    parts = " ".join(f"mu_{x:g}={v:.4g}" for x, v in sorted(rep.percentiles.items()))
    print(f"percentiles N={cfg.n_modes}: {parts} k_recommended={rep.k_recommended}")


def cmd_shots(args):
    if args.sigma_max is not None:
        rep = shot_budget(None, z=args.z, k=args.k, sigma_max=args.sigma_max)
    else:
        cfg = _load_config(args)
        sample = "auto" if args.sample is None else args.sample
        rep = shot_budget(cfg, z=args.z, k=args.k, sample=sample, sample_seed=args.sample_seed)
    _emit(rep, args)
    print(f"shots z={args.z:g} k={args.k}: sigma_max={rep.sigma_max:.6g} N_shot_max={rep.N_shot_max}")


def cmd_haar(args):
    rep = haar_overlap_test(args.n, args.depth, args.realizations, args.bins, args.topology, args.boundary, args.seed)
    report = BenchReport(
        kind="haar-test",
        header={"code_version": __version__, "backend": BACKEND},
        extra={k: v for k, v in rep.__dict__.items()},
        tables={
            "amplitude": (["bin_left", "circuit", "haar"],
                          list(zip(rep.amplitude_edges[:-1], rep.circuit_amplitude, rep.haar_amplitude))),
            "phase": (["bin_left", "circuit", "haar"],
                      list(zip(rep.phase_edges[:-1], rep.circuit_phase, rep.haar_phase))),
        },
    )
    _emit(report, args, "haar_test")
    print(rep.summary())


def cmd_oracle(args):
    cmp = compare_with_oracle(args.n, args.trials, args.inputs, args.cutoff, args.r_on, args.seed,
                              check=not args.no_cutoff_check)
    report = BenchReport(kind="oracle-verify", header={"code_version": __version__, "backend": BACKEND},
                         extra=dict(cmp.__dict__, passed=cmp.passed()))
    _emit(report, args, "oracle_verify")
    verdict = "PASS" if cmp.passed() else "FAIL"
    print(f"oracle-verify N={args.n} cutoff={args.cutoff} trials={args.trials}x{args.inputs}: "
          f"max|dmu|={cmp.max_mu_error:.3e} max|dsigma|={cmp.max_sigma_error:.3e} {verdict}")
    if not cmp.passed():
        raise ToleranceFailure("oracle disagreement above tolerance")


def _circuit_flags(p, k_default=1):
    p.add_argument("--circuit", required=True, help="circuit parameter JSON file")
    p.add_argument("--k", type=int, default=k_default, help="decimal digit index")
    p.add_argument("--r-on", type=float, default=1.0, help="squeezing amplitude for a 1 bit")
    p.add_argument("--force", action="store_true", help="allow N above the enumeration cap")
    p.add_argument("--out", default="reports", help="report directory ('' to skip writing)")


def build_parser():
    parser = argparse.ArgumentParser(prog="gbshash", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gbshash {__version__} ({BACKEND})")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap for the compiled kernel (default $GBSHASH_THREADS or CPU count)")
    sub = parser.add_subparsers(dest="command", required=True)

    params = sub.add_parser("params", help="circuit parameter files")
    psub = params.add_subparsers(dest="params_command", required=True)
    gen = psub.add_parser("gen", help="sample a random circuit")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--depth", type=int, required=True)
    gen.add_argument("--topology", choices=TOPOLOGIES, default="brickwork")
    gen.add_argument("--boundary", choices=BOUNDARIES, default="periodic")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_params_gen)

    h = sub.add_parser("hash", help="hash one message")
    h.add_argument("--circuit", required=True)
    h.add_argument("--k", type=int, default=1)
    h.add_argument("--input", required=True, help="message as b_{N-1}...b_0")
    h.add_argument("--r-on", type=float, default=1.0)
    h.add_argument("--shots", type=int, default=None, help="emulate finite-shot estimation")
    h.add_argument("--noise-seed", type=int, default=0)
    h.add_argument("--verbose", action="store_true")
    h.set_defaults(func=cmd_hash)

    bench = sub.add_parser("bench", help="reproduce the security and cost analyses")
    bsub = bench.add_subparsers(dest="bench_command", required=True)

    p = bsub.add_parser("confusion")
    _circuit_flags(p)
    p.set_defaults(func=cmd_confusion)

    p = bsub.add_parser("diffusion")
    _circuit_flags(p)
    p.add_argument("--flip-seed", type=int, default=0)
    p.set_defaults(func=cmd_diffusion)

    p = bsub.add_parser("collision")
    _circuit_flags(p)
    p.set_defaults(func=cmd_collision)

    p = bsub.add_parser("percentiles")
    _circuit_flags(p)
    p.add_argument("--x", type=float, nargs="+", default=[0.9, 0.95, 0.99])
    p.add_argument("--sample", type=int, default=None, help="pool over a random input sample")
    p.add_argument("--sample-seed", type=int, default=0)
    p.set_defaults(func=cmd_percentiles)

    p = bsub.add_parser("shots")
    p.add_argument("--circuit", default=None)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--z", type=float, default=2.0)
    p.add_argument("--r-on", type=float, default=1.0)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--sigma-max", type=float, default=None, help="use this sigma_max instead of measuring")
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_shots)

    p = bsub.add_parser("haar-test")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--topology", choices=TOPOLOGIES + ("haar",), default="brickwork")
    p.add_argument("--boundary", choices=BOUNDARIES, default="periodic")
    p.add_argument("--realizations", type=int, default=1000)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_haar)

    p = bsub.add_parser("oracle-verify")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--inputs", type=int, default=20)
    p.add_argument("--r-on", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-cutoff-check", action="store_true",
                   help="run even when the truncation discards more than 1e-6 of the state")
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        os.environ["GBSHASH_THREADS"] = str(max(1, args.threads))
    if getattr(args, "command", None) == "bench" and args.bench_command == "shots":
        if args.sigma_max is None and args.circuit is None:
            parser.error("bench shots needs --circuit or --sigma-max")
    try:
        args.func(args)
    except (ToleranceFailure, MomentEngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OracleCutoffError, EnumerationCapError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
