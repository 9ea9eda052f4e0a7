"""Command-line interface.

Subcommands: align, randomize, sweep, discriminate, eval, convert, signatures.
Exit status: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import conservation, evaluation, randomization
from .records import ExperimentRecord, write_csv, write_json
from .search import AlignmentProblem, SearchConfig, run
from .signatures import (
    dumps_signatures,
    load_similarity_file,
    network_similarity,
    node_conservation,
    signatures,
)
from .temporal import (
    Alignment,
    AlignmentError,
    DynamicNetwork,
    NetworkFormatError,
    dumps_edges,
    dumps_events,
    flatten,
    from_snapshots,
    load_edges,
    load_events,
    load_snapshots,
)

log = logging.getLogger("dynalign")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- helpers


def read_network(path, fmt="events"):
    with open(path, "rb") as fh:
        data = fh.read()
    if fmt == "events":
        return load_events(data)
    if fmt == "snapshots":
        return from_snapshots(load_snapshots(data))
    if fmt == "edges":
        return load_edges(data)
    raise UsageError(f"unknown network format {fmt!r}")


def _levels(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None
    if not vals or any(not 0 <= v <= 1 for v in vals):
        raise argparse.ArgumentTypeError("levels must be comma-separated numbers in [0, 1]")
    return vals


def _out_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _add_search_flags(p, mode_default="dynamic"):
    p.add_argument("--mode", choices=("dynamic", "static"), default=mode_default)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--population", type=int, default=SearchConfig.population_size)
    p.add_argument("--generations", type=int, default=SearchConfig.max_generations)
    p.add_argument("--elite", type=float, default=SearchConfig.elite_fraction)
    p.add_argument("--epsilon", type=float, default=SearchConfig.stop_epsilon)
    p.add_argument("--window", type=int, default=SearchConfig.stop_window)
    p.add_argument("--reference-population", action="store_true",
                   help=f"use a population of {SearchConfig.REFERENCE_POPULATION}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def _config(args, mode=None) -> SearchConfig:
    try:
        return SearchConfig(
            alpha=args.alpha,
            population_size=SearchConfig.REFERENCE_POPULATION if args.reference_population else args.population,
            max_generations=args.generations,
            elite_fraction=args.elite,
            stop_epsilon=args.epsilon,
            stop_window=args.window,
            seed=args.seed,
            mode=mode or args.mode,
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_alignment(path, f: Alignment, labels1, labels2):
    with open(path, "w") as fh:
        for u, v in enumerate(f.mapping):
            fh.write(f"{labels1[u]} {labels2[int(v)]}\n")


def read_alignment(path, net1, net2) -> Alignment:
    mapping = np.full(net1.n_nodes, -1, dtype=np.int64)
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            if len(fields) != 2:
                raise NetworkFormatError("expected 2 fields", lineno)
            u, v = fields
            if u not in net1.index or v not in net2.index:
                raise NetworkFormatError(f"unknown node in pair ({u}, {v})", lineno)
            mapping[net1.index[u]] = net2.index[v]
    if (mapping < 0).any():
        raise AlignmentError("alignment file does not cover every node of the first network")
    return Alignment(mapping, net2.n_nodes)


def _prepare(net1, net2, mode):
    if mode == "static" and isinstance(net1, DynamicNetwork):
        return flatten(net1), flatten(net2)
    if mode == "dynamic" and not isinstance(net1, DynamicNetwork):
        raise UsageError("dynamic mode needs event or snapshot input")
    return net1, net2


def _similarity(args, net1, net2):
    if args.alpha >= 1:
        log.info("alpha = 1: node conservation machinery not invoked")
        return None
    if getattr(args, "similarity", None):
        with open(args.similarity, "rb") as fh:
            return load_similarity_file(fh, net1, net2)
    return network_similarity(net1, net2)


# ---------------------------------------------------------------- subcommands


def cmd_align(args):
    cfg = _config(args)
    net1, net2 = _prepare(read_network(args.net1, args.format), read_network(args.net2, args.format), cfg.mode)
    if net1.n_nodes > net2.n_nodes:
        raise AlignmentError(
            f"first network has more nodes than the second ({net1.n_nodes} > {net2.n_nodes}); swap them"
        )
    inputs = [args.net1, args.net2] + ([args.similarity] if args.similarity else [])
    rec = ExperimentRecord.start("align", {**cfg.to_dict(), "format": args.format}, inputs, cfg.seed)
    problem = AlignmentProblem(net1, net2, cfg.alpha, _similarity(args, net1, net2))
    trace = run(cfg, problem)
    out = _out_dir(args.out)
    f = trace.alignment
    _write_alignment(out / "alignment.txt", f, net1.labels, net2.labels)
    scores = {"objective": trace.objective.total, "edge_term": trace.objective.edge_term,
              "node_term": trace.objective.node_term, "alpha": cfg.alpha, "mode": cfg.mode,
              "generations": trace.generations, "stop_reason": trace.stop_reason}
    if cfg.mode == "dynamic":
        d = conservation.ds3(net1, net2, f)
        scores.update(t_conserved=d.t_conserved, t_nonconserved=d.t_nonconserved, ds3=d.ds3)
    else:
        s = conservation.s3(net1, net2, f)
        scores.update(n_conserved=s.n_conserved, n_nonconserved=s.n_nonconserved, s3=s.s3)
    write_json(out / "scores.json", scores)
    write_csv(out / "trace.csv",
              [{"generation": g, "best": b, "mean": m} for g, (b, m) in enumerate(zip(trace.best, trace.mean))])
    rec.finish(out, files=["alignment.txt", "scores.json", "trace.csv"], objective=scores["objective"],
               trace_wall_time=trace.wall_time[-1] if trace.wall_time else 0.0)
    print(f"objective {scores['objective']:.6f} (edge {scores['edge_term']:.6f}, node {scores['node_term']:.6f})"
          f" after {trace.generations} generations [{trace.stop_reason}]")
    return 0


def _noisy_name(stem, scheme, level, rep):
    return f"{stem}.{scheme}.p{level:.4f}.r{rep}.ev"


def cmd_randomize(args):
    scheme = args.scheme.replace("-", "_")
    net = read_network(args.net, args.format)
    if not isinstance(net, DynamicNetwork):
        raise UsageError("randomization needs a dynamic network")
    out = _out_dir(args.out)
    rec = ExperimentRecord.start("randomize", {"scheme": scheme, "levels": args.levels, "reps": args.reps},
                                 [args.net], args.seed)
    stem = Path(args.net).stem
    files = []
    for level in args.levels:
        spec = randomization.NoiseSpec(scheme, level, args.seed, args.reps)
        for rep in range(args.reps):
            noisy = randomization.randomize(net, spec, rep)
            name = _noisy_name(stem, scheme, level, rep)
            (out / name).write_text(dumps_events(noisy))
            files.append(name)
    rec.finish(out, files=files)
    print(f"wrote {len(files)} files to {out}")
    return 0


def cmd_sweep(args):
    scheme = args.scheme.replace("-", "_")
    net = read_network(args.net, args.format)
    if not isinstance(net, DynamicNetwork):
        raise UsageError("sweep needs a dynamic network")
    modes = [] if args.modes == "none" else args.modes.split(",")
    if any(m not in ("dynamic", "static") for m in modes):
        raise UsageError(f"bad --modes {args.modes!r}")
    configs = [_config(args, m) for m in modes]
    out = _out_dir(args.out)
    rec = ExperimentRecord.start(
        "sweep", {"scheme": scheme, "levels": args.levels, "reps": args.reps, "ideal_alpha": args.ideal_alpha,
                  "configs": [c.to_dict() for c in configs]}, [args.net], args.seed)
    rows = evaluation.noise_sweep(net, args.levels, args.reps, scheme, args.seed, configs, args.ideal_alpha,
                                  progress=lambda r: log.info("level %s rep %s %s", r["level"], r["replicate"], r["mode"]))
    write_csv(out / "sweep.csv", rows)
    write_csv(out / "summary.csv", evaluation.summarize_sweep(rows))
    rec.finish(out, files=["sweep.csv", "summary.csv"], rows=len(rows))
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return 0


def cmd_discriminate(args):
    cfg = _config(args)
    if args.generate:
        models = args.generate.split(",")
        nets, labels, inputs = [], [], []
        for m in models:
            for k in range(args.per_model):
                try:
                    nets.append(evaluation.generate_synthetic(m, args.nodes, args.snapshots, args.seed * 1000 + k))
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
                labels.append(m)
    else:
        if not args.nets:
            raise UsageError("give network files or --generate")
        if not args.labels:
            raise UsageError("--labels is required with network files")
        labels = args.labels.split(",")
        if len(labels) != len(args.nets):
            raise UsageError("--labels must name one model per network")
        nets = [read_network(p, args.format) for p in args.nets]
        inputs = list(args.nets)
    out = _out_dir(args.out)
    rec = ExperimentRecord.start("discriminate", {**cfg.to_dict(), "labels": labels, "generate": args.generate,
                                                  "nodes": args.nodes, "snapshots": args.snapshots,
                                                  "per_model": args.per_model}, inputs, cfg.seed)
    dset, rows = evaluation.discriminate(nets, labels, cfg)
    summary = evaluation.pr_roc(dset)
    write_csv(out / "pairs.csv", rows)
    write_csv(out / "curve.csv", summary.points, ["threshold", "precision", "recall", "fpr", "f"])
    write_json(out / "summary.json", {"aupr": summary.aupr, "auroc": summary.auroc, "f_cross": summary.f_cross,
                                      "f_max": summary.f_max, "pairs": len(rows), "mode": cfg.mode})
    rec.finish(out, files=["pairs.csv", "curve.csv", "summary.json"])
    print(f"{len(rows)} pairs: AUPR {summary.aupr:.3f} AUROC {summary.auroc:.3f} "
          f"F_cross {summary.f_cross:.3f} F_max {summary.f_max:.3f}")
    return 0


def cmd_eval(args):
    net1 = read_network(args.net1, args.format)
    net2 = read_network(args.net2, args.format)
    f = read_alignment(args.alignment, net1, net2)
    result = {}
    if args.truth:
        truth = read_alignment(args.truth, net1, net2)
    else:
        try:
            truth = Alignment.by_labels(net1.labels, net2.labels)
        except AlignmentError:
            truth = None
    if truth is not None:
        result["node_correctness"] = evaluation.node_correctness(f, truth)
    if isinstance(net1, DynamicNetwork):
        d = conservation.ds3(net1, net2, f)
        result.update(ds3=d.ds3, t_conserved=d.t_conserved, t_nonconserved=d.t_nonconserved)
        g1, g2 = flatten(net1), flatten(net2)
    else:
        g1, g2 = net1, net2
    s = conservation.s3(g1, g2, f)
    result.update(s3=s.s3, n_conserved=s.n_conserved, n_nonconserved=s.n_nonconserved)
    if args.alpha < 1 or args.similarity:
        a, b = (net1, net2) if args.mode == "dynamic" else (g1, g2)
        sim = _similarity(args, a, b) if args.alpha < 1 else None
        if sim is not None:
            result["node_conservation"] = node_conservation(sim, f)
    edge = result.get("ds3" if args.mode == "dynamic" else "s3", 0.0)
    result["objective"] = args.alpha * edge + (1 - args.alpha) * result.get("node_conservation", 0.0)
    if args.out:
        out = _out_dir(args.out)
        inputs = [args.net1, args.net2, args.alignment] + ([args.truth] if args.truth else [])
        rec = ExperimentRecord.start("eval", {"alpha": args.alpha, "mode": args.mode}, inputs)
        write_json(out / "eval.json", result)
        rec.finish(out, files=["eval.json"])
    for k in sorted(result):
        print(f"{k}\t{result[k]!r}")
    return 0


def cmd_convert(args):
    if args.source_format == "snapshots":
        net = from_snapshots(load_snapshots(Path(args.input).read_bytes()))
    elif args.source_format == "events":
        net = load_events(Path(args.input).read_bytes())
    else:
        net = load_edges(Path(args.input).read_bytes())
    if args.to == "events":
        if not isinstance(net, DynamicNetwork):
            raise UsageError("static edge lists cannot be converted to events")
        text = dumps_events(net)
    else:
        text = dumps_edges(flatten(net) if isinstance(net, DynamicNetwork) else net)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


def cmd_signatures(args):
    net = read_network(args.net, args.format)
    if args.kind == "static" and isinstance(net, DynamicNetwork):
        net = flatten(net)
    elif args.kind == "dynamic" and not isinstance(net, DynamicNetwork):
        raise UsageError("dynamic signatures need a dynamic network")
    text = dumps_signatures(signatures(net))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dynalign", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = dict(choices=("events", "snapshots", "edges"), default="events")

    a = sub.add_parser("align", help="align two networks")
    a.add_argument("net1")
    a.add_argument("net2")
    a.add_argument("--format", **fmt)
    a.add_argument("--similarity", help="file of 'u v s' node similarities")
    a.add_argument("--out", default="align_out")
    _add_search_flags(a)
    a.set_defaults(func=cmd_align)

    r = sub.add_parser("randomize", help="write noisy copies of a dynamic network")
    r.add_argument("net")
    r.add_argument("--format", **fmt)
    r.add_argument("--scheme", choices=("time-swap", "time_swap", "rewire"), default="time-swap")
    r.add_argument("--levels", type=_levels, default=list(randomization.DEFAULT_LEVELS))
    r.add_argument("--reps", type=int, default=5)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", default="randomize_out")
    r.set_defaults(func=cmd_randomize)

    s = sub.add_parser("sweep", help="align a network to its noisy copies over noise levels")
    s.add_argument("net")
    s.add_argument("--format", **fmt)
    s.add_argument("--scheme", choices=("time-swap", "time_swap", "rewire"), default="time-swap")
    s.add_argument("--levels", type=_levels, default=list(randomization.DEFAULT_LEVELS))
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--modes", default="dynamic,static", help="comma list of dynamic,static or 'none'")
    s.add_argument("--ideal-alpha", type=float, default=1.0)
    s.add_argument("--out", default="sweep_out")
    _add_search_flags(s)
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("discriminate", help="network discrimination over labelled networks")
    d.add_argument("nets", nargs="*")
    d.add_argument("--format", **fmt)
    d.add_argument("--labels")
    d.add_argument("--generate", help="comma list of synthetic models, e.g. preferential,geometric")
    d.add_argument("--per-model", type=int, default=3)
    d.add_argument("--nodes", type=int, default=50)
    d.add_argument("--snapshots", type=int, default=10)
    d.add_argument("--out", default="discriminate_out")
    _add_search_flags(d)
    d.set_defaults(func=cmd_discriminate)

    e = sub.add_parser("eval", help="score a given alignment")
    e.add_argument("net1")
    e.add_argument("net2")
    e.add_argument("alignment")
    e.add_argument("--format", **fmt)
    e.add_argument("--truth", help="ground-truth alignment file (default: equal labels)")
    e.add_argument("--mode", choices=("dynamic", "static"), default="dynamic")
    e.add_argument("--alpha", type=float, default=1.0)
    e.add_argument("--similarity")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("convert", help="convert between network formats")
    c.add_argument("input")
    c.add_argument("--from", dest="source_format", choices=("snapshots", "events", "edges"), default="events")
    c.add_argument("--to", choices=("events", "flatten"), default="events")
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_convert)

    g = sub.add_parser("signatures", help="dump GDV or DGDV signatures")
    g.add_argument("net")
    g.add_argument("--format", **fmt)
    g.add_argument("--kind", choices=("static", "dynamic"), default="dynamic")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_signatures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dynalign: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NetworkFormatError, AlignmentError, ValueError, OSError) as exc:
        print(f"dynalign: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
