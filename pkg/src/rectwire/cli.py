"""Command-line entry points.

Every subcommand echoes one resolved-config line (all seeds explicit) so a
run can be reproduced from its log, and exits 0 only if every requested
check passed.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .builders import (build_expander, fragment_biases, fragment_network)
from .circuits import compile_circuit, evaluate_circuit, parse_circuit
from .dynamics import classify
from .encode import read_dataset, write_dataset, write_symbolic_dataset
from .experiments import PRESETS, run_experiment
from .network import (FileFormatError, load_biases, load_network, save_biases,
                      save_network)
from .oracle import solve_conservative, update_cost
from .sda import AGGRESSIVE, ULTRA, sda_update
from .synthdata import NmfSpec, markov_strings, nmf_dataset
from .synthdata import MARKOV_ALPHABET
from .trainer import train_online


def _default_seed() -> int:
    return int(os.environ.get("RWN_SEED", "1"))


def _echo_config(args: argparse.Namespace):
    pairs = sorted(vars(args).items())
    text = " ".join(f"{k}={v}" for k, v in pairs if k != "func" and v is not None)
    print(f"config: {text}")


def _cmd_gen_expander(args) -> int:
    net = build_expander(args.inputs, args.classes, args.growth, args.layers,
                         seed=args.seed, q=args.q)
    save_network(net, args.out)
    print(f"edges: {net.n_edges}")
    print(f"wrote {args.out}")
    return 0


def _cmd_train(args) -> int:
    net = load_network(args.net)
    stream = read_dataset(args.data)
    test = read_dataset(args.test) if args.test else None
    b0 = load_biases(args.biases, net) if args.biases else net.zero_biases()
    r = train_online(net, b0, stream, mode=args.mode,
                     max_items=args.max_items or len(stream),
                     test_samples=test, batch=args.batch,
                     stop_zero_err=args.stop_zero_err,
                     n_threads=args.test_threads)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(r.report.to_csv())
        print(f"wrote {args.report}")
    if args.out_biases:
        save_biases(r.biases, args.out_biases)
        print(f"wrote {args.out_biases}")
    print(f"items={r.items} err={r.err_total} iter={r.iter_total} "
          f"peak_acc={r.peak_accuracy:.4f} stopped={r.stopped}")
    return 0


def _cmd_oracle_update(args) -> int:
    if args.fragment is not None:
        w, b = args.fragment
        net = fragment_network(w)
        biases = fragment_biases(b)
        d = np.array([1.0])
        cls = 0
    else:
        if not args.net or not args.sample_line:
            raise ValueError("need --net and --sample-line (or --fragment)")
        net = load_network(args.net, allow_skips=True)
        biases = (load_biases(args.biases, net) if args.biases
                  else net.zero_biases())
        parts = args.sample_line.split()
        cls = int(parts[0])
        d = np.array([float(p) for p in parts[1:]])
    out = sda_update(net, biases, d, cls, mode=AGGRESSIVE)
    sda_cost = update_cost(biases, out.biases)
    qp = solve_conservative(net, biases, d, cls)
    gap = sda_cost - qp.cost
    print(f"sda_cost={sda_cost:.12g}")
    print(f"qp_cost={qp.cost:.12g}")
    print(f"gap={gap:.12g}")
    print(f"qp_xc_after={qp.xc_after:.3g}")
    scale = max(1.0, float(np.abs(d).sum()))
    ok = gap >= -1e-8 and qp.xc_after <= 1e-8 * scale
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_compile_circuit(args) -> int:
    with open(args.circuit) as fh:
        circuit = parse_circuit(fh.read())
    comp = compile_circuit(circuit)
    save_network(comp.network, args.out)
    out_biases = args.out_biases or args.out + ".rwbias"
    save_biases(comp.biases, out_biases)
    bound = 7 * max(1, comp.n_gates)
    print(f"gates: {comp.n_gates}")
    print(f"hidden nodes: {comp.hidden_nodes} (bound {bound})")
    print(f"rectifier gates: {comp.rectifier_gates}")
    print(f"wrote {args.out} and {out_biases}")
    ok = comp.hidden_nodes <= bound
    if args.verify:
        if circuit.n_vars > 12:
            raise ValueError("--verify supports at most 12 variables")
        good = 0
        total = 2**circuit.n_vars
        for m in range(total):
            bits = [(m >> k) & 1 for k in range(circuit.n_vars)]
            d = np.empty(2 * circuit.n_vars)
            d[0::2] = bits
            d[1::2] = [1 - z for z in bits]
            winners, _ = classify(comp.network, comp.biases, d)
            good += len(winners) == 1 and winners[0] == evaluate_circuit(
                circuit, bits)
        print(f"verified {good}/{total} assignments")
        ok = ok and good == total
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_gen_data(args) -> int:
    if (args.nmf is None) == (args.markov is None):
        raise ValueError("choose exactly one of --nmf / --markov")
    if args.nmf is not None:
        try:
            p, b, c, n = (int(v) for v in args.nmf.split(","))
        except ValueError:
            raise ValueError("--nmf wants p,b,c,n") from None
        samples = nmf_dataset(NmfSpec(p, b, c, n), args.count, args.seed)
        write_dataset(samples, args.out)
    else:
        rows = markov_strings(args.markov, args.count, args.seed)
        write_symbolic_dataset(rows, MARKOV_ALPHABET, args.out)
    print(f"wrote {args.count} samples to {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    res = run_experiment(args.preset, seed=args.seed, data_dir=args.data_dir,
                         max_items=args.max_items)
    for line in res.lines:
        print(line)
    if res.report is not None and args.out:
        with open(args.out, "w") as fh:
            fh.write(res.report.to_csv())
        print(f"wrote {args.out}")
    print(f"preset {res.name}: {'PASS' if res.passed else 'FAIL'}")
    return 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rectwire",
        description="rectified wire networks: build, train, verify")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-expander", help="write a sparse expander network")
    p.add_argument("--inputs", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--growth", type=int, required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_expander)

    p = sub.add_parser("train", help="train biases on a dataset file")
    p.add_argument("--net", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--test")
    p.add_argument("--biases", help="initial biases (default: zeros)")
    p.add_argument("--mode", choices=(ULTRA, AGGRESSIVE), default=ULTRA)
    p.add_argument("--batch", type=int, default=1000)
    p.add_argument("--report", help="CSV output path")
    p.add_argument("--out-biases", help="final bias file")
    p.add_argument("--stop-zero-err", type=float)
    p.add_argument("--max-items", type=int)
    p.add_argument("--test-threads", type=int)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("oracle-update",
                       help="compare one SDA update with the exact QP")
    p.add_argument("--net")
    p.add_argument("--biases")
    p.add_argument("--sample-line", help='"<class> v1 v2 ..."')
    p.add_argument("--fragment", nargs=2, type=float, metavar=("W", "B"),
                   help="use the built-in 4-edge fragment instead")
    p.set_defaults(func=_cmd_oracle_update)

    p = sub.add_parser("compile-circuit",
                       help="compile a Boolean circuit to a network")
    p.add_argument("--circuit", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-biases")
    p.add_argument("--verify", action="store_true",
                   help="exhaustive truth-table check (N <= 12)")
    p.set_defaults(func=_cmd_compile_circuit)

    p = sub.add_parser("gen-data", help="write a synthetic dataset file")
    p.add_argument("--nmf", metavar="P,B,C,N")
    p.add_argument("--markov", type=int, metavar="LEN")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("experiment", help="run a named preset")
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--data-dir")
    p.add_argument("--max-items", type=int)
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=_cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _echo_config(args)
    try:
        return args.func(args)
    except (FileFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
