"""
Command-line interface.

Exit codes: 0 on success, 1 when a computation fails, 2 on usage, input or
output errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import baselines
from .flow import (CONVENTIONS, DEFAULT_TAU, FLOW_MODELS, LINK_TELEPORT,
                   RAW, WITH_EXIT, ConvergenceError,
                   aggregate_partition_flows, compute_flow)
from .graph import Graph, GraphError, epidemic_threshold, read_edge_list
from .mapeq import codelength, mec_all
from .partition import PartitionError, format_partition, read_partition
from .partitioning import (SearchConfig, effective_num_modules, mixing,
                           optimize_two_level)
from .evalmetrics import rewiring_experiment
from .ranking import CentralityVector, rank_nodes, top_count
from .spreading import (SirConfig, imprecision,
                        lt_activation_by_ranking, selection_perplexity,
                        spreading_powers)

log = logging.getLogger("mapcentrality")

METHODS = ("mec", "dc", "bc", "pr", "mv", "chb", "cbc")
COMMUNITY_METHODS = {"mec", "mv", "chb", "cbc"}
SWEEP_METHODS = "mec,mv,chb,cbc,dc,bc"


class UsageError(Exception):
    """Bad input files or arguments (exit code 2)."""


@dataclass
class RunConfig:
    """Options shared by all subcommands; stored as JSON with ``--config``."""

    input: str | None = None
    directed: bool = False
    flow: str | None = None
    teleport_rate: float = DEFAULT_TAU
    convention: str = WITH_EXIT
    methods: list = field(default_factory=lambda: ["mec"])
    output: str | None = None
    output_format: str = "csv"
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def flow_model(self) -> str:
        if self.flow:
            return self.flow
        return LINK_TELEPORT if self.directed else RAW


def fmt(x: float) -> str:
    """Locale-independent, six significant digits."""
    return format(float(x), ".6g")


def parse_range(spec: str) -> list[float]:
    """``start:stop:step`` (endpoints inclusive), a comma list, or one value."""
    if ":" in spec:
        try:
            start, stop, step = (float(x) for x in spec.split(":"))
        except ValueError:
            raise UsageError(f"bad range {spec!r}") from None
        if step <= 0 or stop < start:
            raise UsageError(f"bad range {spec!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    try:
        return [float(x) for x in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad value list {spec!r}") from None


# ----------------------------------------------------------------------
# shared steps

def _config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = RunConfig.from_json(fh.read())
        except OSError as e:
            raise UsageError(str(e)) from None
        except (json.JSONDecodeError, TypeError) as e:
            raise UsageError(f"bad config file: {e}") from None
    for name in ("input", "flow", "convention", "output", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "directed", False):
        cfg.directed = True
    if getattr(args, "teleport_rate", None) is not None:
        cfg.teleport_rate = args.teleport_rate
    if getattr(args, "method", None):
        cfg.methods = args.method.split(",")
    elif not getattr(args, "config", None):
        cfg.methods = getattr(args, "default_methods", "mec").split(",")
    bad = set(cfg.methods) - set(METHODS)
    if bad:
        raise UsageError(f"unknown method(s) {sorted(bad)}")
    if getattr(args, "save_config", None):
        with open(args.save_config, "w", encoding="utf-8") as fh:
            fh.write(cfg.to_json() + "\n")
    if cfg.input is None:
        raise UsageError("no input edge list given")
    return cfg


def _load_graph(cfg: RunConfig) -> Graph:
    try:
        return read_edge_list(cfg.input, directed=cfg.directed)
    except OSError as e:
        raise UsageError(f"cannot read {cfg.input}: {e.strerror}") from None
    except GraphError as e:
        raise UsageError(f"{cfg.input}: {e}") from None


def _search_cfg(args, cfg: RunConfig) -> SearchConfig:
    return SearchConfig(num_runs=getattr(args, "runs", 100), seed=cfg.seed)


def _flow(g, cfg):
    return compute_flow(g, cfg.flow_model(), cfg.teleport_rate)


def _partition(args, g, cfg, f):
    path = getattr(args, "partition", None)
    if path:
        try:
            return read_partition(path, g.labels)
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return optimize_two_level(g, f, _search_cfg(args, cfg)).partition


def _scores(method, g, f, m, cfg, args) -> CentralityVector:
    if method == "mec":
        pf = aggregate_partition_flows(f, m, cfg.convention)
        return mec_all(pf, f.model_tag)
    if method == "dc":
        return baselines.degree_centrality(g)
    if method == "bc":
        return baselines.betweenness_centrality(g)
    if method == "pr":
        return baselines.pagerank(g, cfg.teleport_rate)
    if method == "mv":
        return baselines.modularity_vitality(g, m)
    if method == "chb":
        return baselines.community_hub_bridge(
            g, m, literal=getattr(args, "literal_chb", False))
    if method == "cbc":
        return baselines.community_based_centrality(g, m)
    raise UsageError(f"unknown method {method!r}")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline=""), True
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from None


def _emit(text: str, path):
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _setup(args):
    cfg = _config(args)
    g = _load_graph(cfg)
    f = _flow(g, cfg)
    return cfg, g, f


# ----------------------------------------------------------------------
# subcommands

def cmd_partition(args) -> int:
    cfg, g, f = _setup(args)
    res = optimize_two_level(g, f, _search_cfg(args, cfg))
    m = res.partition
    summary = {
        "codelength": round(res.codelength, 12),
        "one_level_codelength": round(res.one_level_codelength, 12),
        "num_modules": m.num_modules,
        "effective_modules": round(effective_num_modules(m), 12),
        "mixing": round(mixing(g, m), 12),
        "flow": f.model_tag,
    }
    _emit(format_partition(m, g.labels), cfg.output)
    text = json.dumps(summary, sort_keys=True) + "\n"
    if args.summary:
        _emit(text, args.summary)
    elif cfg.output in (None, "-"):
        sys.stderr.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_centrality(args) -> int:
    cfg, g, f = _setup(args)
    method = cfg.methods[0]
    m = (_partition(args, g, cfg, f) if method in COMMUNITY_METHODS
         else None)
    cv = _scores(method, g, f, m, cfg, args)
    lines = ["node,score"]
    lines += [f"{g.labels[u]},{fmt(cv.scores[u])}"
              for u in rank_nodes(cv.scores).tolist()]
    _emit("\n".join(lines) + "\n", cfg.output)
    return 0


def _method_scores(args, cfg, g, f):
    m = None
    if any(x in COMMUNITY_METHODS for x in cfg.methods):
        m = _partition(args, g, cfg, f)
    return m, {meth: _scores(meth, g, f, m, cfg, args).scores
               for meth in cfg.methods}


def _rows_csv(rows, header="method,flow,x,value"):
    out = [header]
    out += [f"{meth},{flow},{fmt(x)},{fmt(v)}" for meth, flow, x, v in rows]
    return "\n".join(out) + "\n"


def cmd_lt(args) -> int:
    cfg, g, f = _setup(args)
    _, scores = _method_scores(args, cfg, g, f)
    rows = []
    for meth, s in scores.items():
        for x in parse_range(args.fractions):
            rows.append((meth, f.model_tag, x,
                         lt_activation_by_ranking(g, s, x, args.threshold,
                                                  args.direction)))
    _emit(_rows_csv(rows), cfg.output)
    return 0


def _sir_cfg(args, g, cfg) -> SirConfig:
    if args.p == "auto":
        return SirConfig.at_threshold(g, repetitions=args.reps, seed=cfg.seed)
    try:
        p = float(args.p)
    except ValueError:
        raise UsageError(f"bad infection probability {args.p!r}") from None
    return SirConfig(p=min(1.0, max(0.0, p)), repetitions=args.reps,
                     seed=cfg.seed)


def _powers(args, g, cfg) -> np.ndarray:
    if getattr(args, "powers", None):
        try:
            with open(args.powers, encoding="utf-8") as fh:
                rows = [ln.strip().split(",") for ln in fh
                        if ln.strip() and not ln.startswith("node")]
        except OSError as e:
            raise UsageError(f"cannot read {args.powers}: {e.strerror}") \
                from None
        power = np.full(g.n, np.nan)
        for lab, val in rows:
            power[g.index_of(lab)] = float(val)
        if np.isnan(power).any():
            raise UsageError("power file does not cover every node")
        return power
    return spreading_powers(g, _sir_cfg(args, g, cfg),
                            workers=args.workers)


def cmd_sir(args) -> int:
    cfg = _config(args)
    g = _load_graph(cfg)
    power = spreading_powers(g, _sir_cfg(args, g, cfg), workers=args.workers)
    lines = ["node,power"] + [f"{g.labels[u]},{fmt(power[u])}"
                              for u in range(g.n)]
    _emit("\n".join(lines) + "\n", cfg.output)
    return 0


def cmd_imprecision(args) -> int:
    cfg, g, f = _setup(args)
    _, scores = _method_scores(args, cfg, g, f)
    power = _powers(args, g, cfg)
    rows = []
    for meth, s in scores.items():
        ranking = rank_nodes(s)
        for x in parse_range(args.fractions):
            rows.append((meth, f.model_tag, x, imprecision(ranking, power, x)))
    _emit(_rows_csv(rows), cfg.output)
    return 0


def cmd_perplexity(args) -> int:
    cfg, g, f = _setup(args)
    m, scores = _method_scores(args, cfg, g, f)
    if m is None:
        m = _partition(args, g, cfg, f)
    rows = []
    for meth, s in scores.items():
        ranking = rank_nodes(s)
        for x in parse_range(args.fractions):
            sel = ranking[:top_count(x, g.n)]
            rows.append((meth, f.model_tag, x, selection_perplexity(m, sel)))
    _emit(_rows_csv(rows), cfg.output)
    return 0


def cmd_evaluate(args) -> int:
    handler = {"lt": cmd_lt, "sir-imprecision": cmd_imprecision,
               "perplexity": cmd_perplexity}[args.metric]
    return handler(args)


def cmd_rewire_exp(args) -> int:
    cfg, g, _ = _setup(args)
    try:
        truth = read_partition(args.truth, g.labels)
    except OSError as e:
        raise UsageError(f"cannot read {args.truth}: {e.strerror}") from None
    records = rewiring_experiment(
        g, truth, parse_range(args.r), repeats=args.repeats,
        cfg=_search_cfg(args, cfg), seed=cfg.seed, flow_model=cfg.flow_model(),
        tau=cfg.teleport_rate, convention=cfg.convention,
        rewire_method=args.rewire_method)
    _emit("".join(rec.to_json() + "\n" for rec in records), cfg.output)
    return 0


def cmd_stats(args) -> int:
    cfg = _config(args)
    g = _load_graph(cfg)
    st = g.degree_stats()
    out = {"nodes": g.n, "links": g.link_count,
           "mean_degree": st.mean_degree,
           "mean_square_degree": st.mean_square_degree,
           "self_loops_dropped": g.self_loops_dropped}
    try:
        out["epidemic_threshold"] = epidemic_threshold(g)
    except ZeroDivisionError:
        out["epidemic_threshold"] = None
    if args.partition or args.detect:
        f = _flow(g, cfg)
        m = _partition(args, g, cfg, f)
        out.update(num_modules=m.num_modules,
                   effective_modules=effective_num_modules(m),
                   mixing=mixing(g, m), codelength=codelength(f, m),
                   flow=f.model_tag)
    _emit(json.dumps(out, sort_keys=True) + "\n", cfg.output)
    return 0


# ----------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="edge list file")
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--save-config", help="write effective configuration")
    common.add_argument("--directed", action="store_true", default=None)
    common.add_argument("--flow", choices=FLOW_MODELS,
                        help="default: raw (undirected), link-teleport "
                             "(directed)")
    common.add_argument("--teleport-rate", type=float)
    common.add_argument("--convention", choices=CONVENTIONS)
    common.add_argument("--seed", type=int)
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    part = argparse.ArgumentParser(add_help=False)
    part.add_argument("--partition", help="partition file")
    part.add_argument("--detect", action="store_true",
                      help="detect modules (default if no partition given)")
    part.add_argument("--runs", type=int, default=100,
                      help="search runs (default 100)")

    meth = argparse.ArgumentParser(add_help=False)
    meth.add_argument("--method", default=None,
                      help="comma-separated subset of " + ",".join(METHODS))
    meth.add_argument("--literal-chb", action="store_true",
                      help="sum |m| k_u^m over all modules in hub-bridge")

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--fractions", default="0.01:0.2:0.01")

    sir = argparse.ArgumentParser(add_help=False)
    sir.add_argument("--p", default="auto",
                     help="infection probability or 'auto' (epidemic "
                          "threshold)")
    sir.add_argument("--reps", type=int, default=1000)
    sir.add_argument("--workers", type=int, default=None,
                     help="processes (default $MAPCENTRALITY_THREADS or 1)")
    sir.add_argument("--powers", help="precomputed node,power CSV")

    lt = argparse.ArgumentParser(add_help=False)
    lt.add_argument("--threshold", type=float, default=0.5)
    lt.add_argument("--direction", choices=("in", "out"), default="in")

    p = argparse.ArgumentParser(
        prog="mapcentrality",
        description="Map equation centrality and community-aware baselines")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("partition", parents=[common, part],
                       help="detect a two-level partition")
    s.add_argument("--summary", help="JSON summary file")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("centrality", parents=[common, part, meth],
                       help="score nodes with one method")
    s.set_defaults(func=cmd_centrality)

    s = sub.add_parser("lt", parents=[common, part, meth, sweep, lt],
                       help="linear threshold activation sweep")
    s.set_defaults(func=cmd_lt)

    s = sub.add_parser("sir", parents=[common, sir],
                       help="SIR spreading power per node")
    s.set_defaults(func=cmd_sir)

    s = sub.add_parser("imprecision", parents=[common, part, meth, sweep, sir],
                       help="SIR imprecision sweep")
    s.set_defaults(func=cmd_imprecision)

    s = sub.add_parser("perplexity", parents=[common, part, meth, sweep],
                       help="perplexity of top-x selections over modules")
    s.set_defaults(func=cmd_perplexity)

    s = sub.add_parser("evaluate", parents=[common, part, meth, sweep, sir, lt],
                       help="lt, sir-imprecision or perplexity sweep")
    s.add_argument("--metric", required=True,
                   choices=("lt", "sir-imprecision", "perplexity"))
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("rewire-exp", parents=[common, part],
                       help="rewiring experiment against a ground truth")
    s.add_argument("--truth", required=True, help="ground-truth partition")
    s.add_argument("--r", default="0:1:0.05")
    s.add_argument("--repeats", type=int, default=100)
    s.add_argument("--rewire-method", choices=("uniform", "swap"),
                   default="uniform")
    s.set_defaults(func=cmd_rewire_exp)

    s = sub.add_parser("stats", parents=[common, part],
                       help="degree statistics and partition summary")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    args.default_methods = ("mec" if args.command == "centrality"
                            else SWEEP_METHODS)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (PartitionError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConvergenceError, GraphError, ValueError,
            ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
