"""
Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage / dimension / family
mismatch, 3 capacity exceeded, 4 internal invariant breach. The default
seed comes from the UQC_SEED environment variable (0 if unset).
"""
from __future__ import annotations

import argparse
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from .circuit import CircuitError, FamilyError, parse_circuit
from .depth_universal import (CapacityError, UniversalTemplate, build_universal, depth_report,
                              encode_circuit)
from .encoding import Encoding, EncodingError
from .simulator import ClassicalityError, SimulationError, verify_encoding
from .size_universal import (EmbeddingError, GraphError, PaletteError, SizeUniversalTemplate,
                             build_edge_universal, build_size_universal, embed, encode_size,
                             encoding_length, random_gamma2)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY, EXIT_INTERNAL = 0, 1, 2, 3, 4


class Reporter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout

    def emit(self, human: str, **fields):
        if self.fmt == "machine":
            print(" ".join(f"{k}={_fmt(v)}" for k, v in fields.items()), file=self.out)
        else:
            print(human, file=self.out)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, bool):
        return int(v)
    return v


def _default_seed() -> int:
    try:
        return int(os.environ.get("UQC_SEED", "0"))
    except ValueError:
        return 0


def _int_range(text: str) -> list[int]:
    """'1-6' or '2,4,8' or '3'."""
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out += list(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _load_template(prefix: str):
    meta = json.loads(Path(prefix).with_suffix(".json").read_text())
    if meta.get("kind") == "size-universal":
        return SizeUniversalTemplate.load(prefix)
    return UniversalTemplate.load(prefix)


# subcommands

def cmd_build_du(args, rep: Reporter) -> int:
    t = build_universal(args.n, args.d, args.family, strict=args.strict)
    prefix = args.out or f"du_n{args.n}_d{args.d}_{t.family.lower()}"
    files = t.save(prefix)
    r = depth_report(t)
    rep.emit(f"depth-universal template n={r.n} d={r.d} family={t.family}: depth {r.depth}, "
             f"{r.qubits} qubits, {len(t.slot_map)} encoding slots, K_U={r.K_U:g}, "
             f"k_q={r.k_q:.4f}\nwrote {', '.join(map(str, files))}",
             command="build-du", n=r.n, d=r.d, family=t.family, depth=r.depth,
             qubits=r.qubits, slots=len(t.slot_map), K_U=r.K_U, k_q=r.k_q, prefix=prefix)
    return EXIT_PASS


def cmd_build_su(args, rep: Reporter) -> int:
    t = build_size_universal(args.n, args.c, args.palette.split(","))
    prefix = args.out or f"su_n{args.n}_c{args.c}"
    files = t.save(prefix)
    m = args.n + args.c
    k = t.circuit.size / (m * max(1.0, math.log2(m)))
    rep.emit(f"size-universal template n={t.n} c={t.c} palette={','.join(t.palette)}: "
             f"{t.circuit.size} gates (bound {t.size_bound():.0f}, measured k={k:.3f}), "
             f"{len(t.graph.vertices)} graph vertices, {len(t.slot_map)} encoding slots"
             f"\nwrote {', '.join(map(str, files))}",
             command="build-su", n=t.n, c=t.c, palette=",".join(t.palette), gates=t.circuit.size,
             bound=t.size_bound(), k=k, vertices=len(t.graph.vertices), slots=len(t.slot_map),
             closed_form=encoding_length(t.n, t.c, len(t.palette), t.n_switches), prefix=prefix)
    return EXIT_PASS


def cmd_encode(args, rep: Reporter) -> int:
    c = parse_circuit(Path(args.circuit).read_text())
    t = _load_template(args.template)
    x = encode_size(c, t) if isinstance(t, SizeUniversalTemplate) else encode_circuit(c, t)
    text = x.to_text()
    if args.out:
        Path(args.out).write_text(text)
        rep.emit(f"wrote {len(x)}-slot encoding to {args.out} ({sum(x)} bits set)",
                 command="encode", slots=len(x), ones=sum(x), out=args.out)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_verify(args, rep: Reporter) -> int:
    t = _load_template(args.template)
    x = Encoding.from_text(Path(args.encoding).read_text())
    c = parse_circuit(Path(args.circuit).read_text())
    if len(x) != len(t.slot_map):
        raise SimulationError(f"encoding has {len(x)} slots, template expects {len(t.slot_map)}")
    r = verify_encoding(t.circuit, t.layout, x.bits, c, mode=args.mode, trials=args.trials,
                        seed=args.seed, tolerance=args.tolerance)
    rep.emit(r.summary(), command="verify", **dict(kv.split("=") for kv in r.record().split()),
             seed=args.seed)
    return EXIT_PASS if r.passed else EXIT_FAIL


def cmd_embed(args, rep: Reporter) -> int:
    eu = build_edge_universal(args.N)
    eu.check()
    rng = np.random.default_rng(args.seed)
    ok = 0
    for _ in range(args.random):
        embed(random_gamma2(args.N, rng), eu)   # raises on any invalid embedding
        ok += 1
    rep.emit(f"N={args.N}: {ok}/{args.random} random graphs embedded, edge-disjointness verified; "
             f"{len(eu.vertices)} vertices, k={eu.size_constant():.3f}",
             command="embed", N=args.N, trials=args.random, success=ok,
             vertices=len(eu.vertices), k=eu.size_constant(), seed=args.seed)
    return EXIT_PASS


def cmd_graph_export(args, rep: Reporter) -> int:
    eu = build_edge_universal(args.eu)
    emb = None
    if args.random_embedding:
        emb = embed(random_gamma2(args.eu, np.random.default_rng(args.seed)), eu)
    dot = eu.to_dot(emb)
    if args.out:
        Path(args.out).write_text(dot)
        rep.emit(f"wrote DOT for N={args.eu} ({len(eu.vertices)} vertices) to {args.out}",
                 command="graph-export", N=args.eu, vertices=len(eu.vertices), out=args.out)
    else:
        sys.stdout.write(dot)
    return EXIT_PASS


def cmd_stats(args, rep: Reporter) -> int:
    if args.kind == "du":
        print("n,d,family,depth,qubits,K_U,k_q")
        for n in _int_range(args.n):
            for d in _int_range(args.d):
                r = depth_report(build_universal(n, d, args.family))
                print(f"{n},{d},{args.family},{r.depth},{r.qubits},{r.K_U:g},{r.k_q:.4f}")
    else:
        print("N,vertices,edges,k")
        for N in _int_range(args.N):
            eu = build_edge_universal(N)
            print(f"{N},{len(eu.vertices)},{len(eu.edges)},{eu.size_constant():.4f}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uqc", description="Universal quantum circuit compiler and verifier.")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-du", help="build a depth-universal template")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--family", default="f", choices=("f", "fprime", "F", "Fprime"))
    s.add_argument("--strict", action="store_true", help="expand into the family basis")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_build_du)

    s = sub.add_parser("build-su", help="build a size-universal template")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-c", type=int, required=True)
    s.add_argument("--palette", default="h,t,cnot")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_build_su)

    s = sub.add_parser("encode", help="encode a circuit for a template")
    s.add_argument("circuit")
    s.add_argument("--template", required=True, help="template file prefix")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("verify", help="check a template + encoding against a circuit")
    s.add_argument("--template", required=True)
    s.add_argument("--encoding", required=True)
    s.add_argument("--circuit", required=True)
    s.add_argument("--mode", choices=("all-basis", "random"), default="all-basis")
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--tolerance", type=float, default=1e-9)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("embed", help="embed random fanin-2 graphs into an edge-universal graph")
    s.add_argument("-N", type=int, required=True)
    s.add_argument("--random", type=int, default=100)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("graph-export", help="DOT export of an edge-universal graph")
    s.add_argument("--eu", type=int, required=True, metavar="N")
    s.add_argument("--random-embedding", action="store_true")
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_graph_export)

    s = sub.add_parser("stats", help="scaling tables as CSV")
    s.add_argument("kind", choices=("du", "su"))
    s.add_argument("--n", default="1-6")
    s.add_argument("--d", default="0-8")
    s.add_argument("--family", default="F")
    s.add_argument("--N", default="2,4,8,16,32,64,128,256,512,1024")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Reporter(args.format)
    try:
        return args.func(args, rep)
    except CapacityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (EmbeddingError, ClassicalityError, GraphError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (CircuitError, FamilyError, EncodingError, SimulationError, PaletteError,
            ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
