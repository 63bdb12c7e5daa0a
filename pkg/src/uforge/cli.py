"""``uforge`` experiment runner.

Exit status: 0 success / property holds, 1 checked property fails,
2 usage or input error.
"""
import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .control import DriftControls, drift_tangent_rank, resample_nearest, sample_gamma, time_ordered_exp
from .freelie import TreeParseError, Leaf, lyndon_words, parse_tree, verify_conjecture_III, witt_dimension
from .generators import GeneratorPair, random_dense_pair, random_traceless_hermitian
from .infinitesimal import DEFAULT_T_GRID, compile_nested, order_slope
from .linalg import is_hermitian
from .optimizer import DescentConfig, compile_target, synthesize
from .tangent import verify_conjecture_I, verify_conjecture_II

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "verify": {"dim": 3, "qubits": 3, "trials": 20, "seed": 0, "max_order": 6, "tol": 1e-8,
               "jobs": 1, "homogeneous": False, "n_pairs": None},
    "synthesize": {"seed": 0, "tol": 1e-6, "block_size": None, "max_blocks": 3, "max_iter": 5000,
                   "epsilon": None, "time": None, "controls_a": None, "controls_b": None,
                   "frobenius_tol": 1e-6, "init": "mirror", "loss": "re"},
    "bch": {"dim": 4, "seed": 0, "time": 0.01},
    "lyndon": {"q": 2, "max_len": 5},
    "witt": {"q": 2, "max_k": 6},
    "drift": {"dim": 2, "seed": 0, "steps": None, "scale": 0.05, "gamma0": 1.0, "tol": 1e-8},
    "trotter": {"dim": 2, "seed": 0, "time": 1.0, "steps": 64, "samples": None, "reference_steps": 4096},
}


class UsageError(Exception):
    pass


def _out_dir(args):
    out = Path(args.out or os.environ.get("UFORGE_OUT") or "uforge_out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve(args, command):
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS.get(command, {}))
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        section = from_file.get(command, from_file)
        for key, value in section.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise UsageError(f"unknown config key {key!r} for {command}")
            cfg[key] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _require(cond, message):
    if not cond:
        raise UsageError(message)


def cmd_verify(args):
    p = _resolve(args, "verify")
    _require(p["trials"] >= 1, "--trials must be >= 1")
    _require(p["tol"] > 0, "--tol must be positive")
    _require(p["jobs"] >= 1, "--jobs must be >= 1")
    out = _out_dir(args)
    if args.kind == "I":
        _require(p["dim"] >= 2, "--dim must be >= 2")
        report = verify_conjecture_I(p["dim"], p["trials"], p["seed"], p["n_pairs"], p["tol"], jobs=p["jobs"])
    elif args.kind == "II":
        _require(p["qubits"] >= 3, "--qubits must be >= 3")
        report = verify_conjecture_II(p["qubits"], p["trials"], p["seed"], p["homogeneous"], p["n_pairs"],
                                      p["tol"], jobs=p["jobs"])
    else:
        _require(p["dim"] >= 2, "--dim must be >= 2")
        _require(p["max_order"] >= 1, "--max-order must be >= 1")
        report = verify_conjecture_III(p["dim"], p["max_order"], p["seed"], p["tol"])
        print(report.table())
        io.write_csv(out / "verify_III.csv", [vars(r) for r in report.rows],
                     ["order", "lyndon_count", "independent", "cumulative_rank", "expected_rank"])
    data = report.to_dict()
    data["resolved_config"] = p
    io.write_json(out / f"verify_{args.kind}.json", data)
    if args.kind != "III":
        hits = sum(r == report.target_rank for r in report.ranks)
        print(f"conjecture {args.kind}: d={report.dimension} N={report.n_pairs} "
              f"{hits}/{report.trials} ranks = {report.target_rank}; min gap {report.min_gap:.3e}")
        if report.under_parameterized:
            print(f"under-parameterized: 2N={2 * report.n_pairs} < d^2-1={report.target_rank}")
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def _load_controls(p, d):
    if p["controls_a"] or p["controls_b"]:
        _require(p["controls_a"] and p["controls_b"], "give both --controls-a and --controls-b")
        from .generators import ControlPair

        return ControlPair(io.read_matrix(p["controls_a"]), io.read_matrix(p["controls_b"]))
    return random_dense_pair(d, p["seed"])


def cmd_synthesize(args):
    p = _resolve(args, "synthesize")
    _require(bool(args.target) != bool(args.pairs), "give exactly one of --target or --pairs")
    out = _out_dir(args)
    if args.pairs:
        target = io.read_training_pairs(args.pairs)
        d = target.dim
    else:
        target = io.read_matrix(args.target)
        d = target.shape[0]
    _require(d >= 2, "target dimension must be >= 2")
    controls = _load_controls(p, d)
    _require(controls.dim == d, f"controls have d={controls.dim}, target d={d}")
    cfg = DescentConfig(
        max_iterations=p["max_iter"], convergence_threshold=p["tol"],
        block_size=p["block_size"] or d * d, max_blocks=p["max_blocks"], seed=p["seed"], init=p["init"], loss=p["loss"],
    )
    if args.target and p["time"] is None and p["loss"] == "re" and abs(np.linalg.det(target) - 1) > 1e-8:
        print("warning: target is not in SU(d); the phase-sensitive loss cannot reach 0 (try --loss abs)",
              file=sys.stderr)
    if p["time"] is not None:
        _require(args.target, "--time needs a Hamiltonian given by --target")
        _require(is_hermitian(target), "--time expects --target to hold a Hermitian matrix")
        eps = p["epsilon"] if p["epsilon"] is not None else abs(p["time"])
        result = compile_target(target, p["time"], eps, controls, cfg, p["frobenius_tol"])
        descent, seq = result.descent, result.sequence
        summary = result.to_dict()
        ok = result.frobenius_error <= p["frobenius_tol"]
        print(f"repeats={result.repeats} pulses={result.total_pulses} frobenius_error={result.frobenius_error:.3e}")
    else:
        descent = synthesize(target, controls, cfg)
        seq = descent.final_sequence
        summary = descent.to_dict()
        ok = descent.converged
        print(f"E={descent.final_error:.3e} iterations={descent.iterations} blocks={descent.blocks_used}")
    summary["resolved_config"] = p
    summary["sequence_file"] = "sequence.txt"
    io.write_json(out / "synthesize.json", summary)
    io.write_csv(out / "trace.csv", descent.trace_rows(), ["iteration", "error", "step", "block_count"])
    io.write_sequence(out / "sequence.txt", seq)
    io.write_matrix(out / "A.txt", controls.a)
    io.write_matrix(out / "B.txt", controls.b)
    print("CONVERGED" if ok else "NOT CONVERGED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bch(args):
    p = _resolve(args, "bch")
    try:
        tree = parse_tree(args.tree)
    except TreeParseError as exc:
        raise UsageError(f"cannot parse {args.tree!r}: {exc}") from None
    _require(p["dim"] >= 2, "--dim must be >= 2")
    out = _out_dir(args)
    controls = random_dense_pair(p["dim"], p["seed"])
    program = compile_nested(tree, controls, p["time"])
    io.write_sequence(out / "program.txt", program.sequence, tree=str(tree))
    if isinstance(tree, Leaf):
        print(f"{tree}: single pulse, exact compilation (no approximation error)")
        io.write_json(out / "bch.json", {"tree": str(tree), "exact": True, "n_pulses": 1, "resolved_config": p})
        return EXIT_OK
    fit = order_slope(tree, controls, DEFAULT_T_GRID)
    io.write_csv(out / "bch.csv", [{"t": t, "deviation": dv} for t, dv in zip(fit.t_values, fit.deviations)],
                 ["t", "deviation"])
    expected = tree.degree + 1
    io.write_json(out / "bch.json", {"tree": str(tree), "n_pulses": len(program.sequence),
                                     "degree": tree.degree, "expected_slope": expected,
                                     **fit.to_dict(), "resolved_config": p})
    print(f"{tree}: {len(program.sequence)} pulses, degree {tree.degree}")
    for t, dv in zip(fit.t_values, fit.deviations):
        print(f"  t={t:.6g}  deviation={dv:.6e}")
    print(f"fitted slope {fit.slope:.3f} (leading error order {expected})")
    return EXIT_OK


def cmd_lyndon(args):
    p = _resolve(args, "lyndon")
    _require(p["q"] >= 2 and p["max_len"] >= 1, "need --q >= 2 and --max-len >= 1")
    out = _out_dir(args)
    words = lyndon_words(p["q"], p["max_len"])
    width = max(len(w) for w in words)
    for i, w in enumerate(words, 1):
        print(f"{i:>4}  {len(w):>3}  {str(w):<{width}}")
    io.write_csv(out / "lyndon.csv", [{"index": i, "length": len(w), "word": str(w)} for i, w in enumerate(words, 1)],
                 ["index", "length", "word"])
    return EXIT_OK


def cmd_witt(args):
    p = _resolve(args, "witt")
    _require(p["q"] >= 2 and p["max_k"] >= 1, "need --q >= 2 and --max-k >= 1")
    out = _out_dir(args)
    rows = [{"k": k, "a_k": witt_dimension(p["q"], k)} for k in range(1, p["max_k"] + 1)]
    for r in rows:
        print(f"{r['k']:>4}  {r['a_k']:>8}")
    io.write_csv(out / "witt.csv", rows, ["k", "a_k"])
    return EXIT_OK


def cmd_drift(args):
    p = _resolve(args, "drift")
    d = p["dim"]
    _require(d >= 2, "--dim must be >= 2")
    rng = np.random.default_rng(p["seed"])
    h0, ha, hb = (random_traceless_hermitian(d, rng) for _ in range(3))
    dc = DriftControls(h0, ha, hb, p["gamma0"])
    steps = p["steps"] or math.ceil(d * d / 2)
    report = drift_tangent_rank(dc, steps, p["scale"], p["seed"], p["tol"])
    out = _out_dir(args)
    data = report.to_dict()
    data["resolved_config"] = p
    io.write_json(out / "drift.json", data)
    print(f"drift directions: rank {report.rank} of {report.target_rank}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_trotter(args):
    p = _resolve(args, "trotter")
    d, T, m = p["dim"], p["time"], p["steps"]
    _require(d >= 2 and T > 0 and m >= 1, "need --dim >= 2, --time > 0, --steps >= 1")
    rng = np.random.default_rng(p["seed"])
    h0, hc = random_traceless_hermitian(d, rng), random_traceless_hermitian(d, rng)
    if p["samples"]:
        times, values = io.read_samples(p["samples"])

        def gamma_at(mm):
            return resample_nearest(times, values, mm, T)
    else:
        def gamma_at(mm):
            return sample_gamma(np.sin, T, mm)
    ref = time_ordered_exp(h0, hc, *gamma_at(p["reference_steps"]))
    rows = []
    mm = 1
    while mm <= m:
        err = float(np.linalg.norm(time_ordered_exp(h0, hc, *gamma_at(mm)) - ref))
        rows.append({"steps": mm, "dt": T / mm, "error": err})
        print(f"m={mm:>6}  dt={T / mm:.4e}  error={err:.4e}")
        mm *= 2
    out = _out_dir(args)
    io.write_csv(out / "trotter.csv", rows, ["steps", "dt", "error"])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="uforge", description="uforge experiment runner")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default $UFORGE_OUT or ./uforge_out)")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="spanning / independence experiments")
    v.add_argument("kind", choices=["I", "II", "III"])
    v.add_argument("--dim", type=int)
    v.add_argument("--qubits", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--max-order", dest="max_order", type=int)
    v.add_argument("--tol", type=float, help="relative singular-value cutoff")
    v.add_argument("--jobs", type=int)
    v.add_argument("--n-pairs", dest="n_pairs", type=int)
    v.add_argument("--homogeneous", action="store_true", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("synthesize", parents=[common], help="gradient-descent synthesis")
    s.add_argument("--target", help="unitary matrix file (Hermitian H when --time is given)")
    s.add_argument("--pairs", help="training-pair file")
    s.add_argument("--controls-a", dest="controls_a")
    s.add_argument("--controls-b", dest="controls_b")
    s.add_argument("--tol", type=float, help="convergence threshold on E")
    s.add_argument("--block-size", dest="block_size", type=int)
    s.add_argument("--max-blocks", dest="max_blocks", type=int)
    s.add_argument("--max-iter", dest="max_iter", type=int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--time", type=float)
    s.add_argument("--frobenius-tol", dest="frobenius_tol", type=float)
    s.add_argument("--init", choices=["mirror", "random"])
    s.add_argument("--loss", choices=["re", "abs"], help="phase-sensitive (default) or phase-insensitive overlap")
    s.set_defaults(func=cmd_synthesize)

    b = sub.add_parser("bch", parents=[common], help="compile a nested commutator and fit its error order")
    b.add_argument("tree")
    b.add_argument("--dim", type=int)
    b.add_argument("--time", type=float, help="base pulse time of the saved program")
    b.set_defaults(func=cmd_bch)

    ly = sub.add_parser("lyndon", parents=[common], help="list Lyndon words")
    ly.add_argument("--q", type=int)
    ly.add_argument("--max-len", dest="max_len", type=int)
    ly.set_defaults(func=cmd_lyndon)

    w = sub.add_parser("witt", parents=[common], help="Witt dimensions a_k")
    w.add_argument("--q", type=int)
    w.add_argument("--max-k", dest="max_k", type=int)
    w.set_defaults(func=cmd_witt)

    dr = sub.add_parser("drift", parents=[common], help="first-order direction rank with a drift term")
    dr.add_argument("--dim", type=int)
    dr.add_argument("--steps", type=int)
    dr.add_argument("--scale", type=float)
    dr.add_argument("--gamma0", type=float)
    dr.add_argument("--tol", type=float)
    dr.set_defaults(func=cmd_drift)

    tr = sub.add_parser("trotter", parents=[common], help="time-ordered exponential convergence")
    tr.add_argument("--dim", type=int)
    tr.add_argument("--time", type=float)
    tr.add_argument("--steps", type=int, help="largest step count (powers of two up to it)")
    tr.add_argument("--samples", help="two-column 'time value' control file")
    tr.set_defaults(func=cmd_trotter)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, io.FileFormatError, ValueError, OSError) as exc:
        print(f"uforge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
