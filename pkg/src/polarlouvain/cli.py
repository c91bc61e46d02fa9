"""Batch command line: detect, sweep, score, synth, shapley, export.

Every option can also come from a flat ``key = value`` config file passed
with ``--config``; precedence is command line > config file > default.
Failures print one JSON line ``{"error": ..., "reason": ...}`` on stderr
and exit with 2 (bad input or configuration) or 3 (degenerate measure or
undefined score).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .capacity import shapley_brute_force, shapley_closed_form
from .community import (
    BlendSpec,
    DisconnectedGraphWarning,
    blend,
    feature_matrix,
    gamma_sweep,
    modularity,
    polarization_louvain,
)
from .errors import (
    ContractViolation,
    DegenerateDialogueError,
    DegenerateMeasureError,
    DegeneratePolarizationError,
    EdgeListError,
    EmptyGraphError,
    MembershipError,
    SizeLimitError,
    UndefinedModularityError,
    UndefinedScoreError,
)
from .graph import WeightedGraph, dump_node_link, largest_component, load_edge_list, to_dot, write_edge_list
from .operators import GROUPINGS, NEGATIONS, OVERLAPS, SYMMETRIZERS, OperatorConfig
from .partition import Partition
from .polarization import (
    DIALOGUE,
    NORM_MODES,
    RISK,
    MembershipProfile,
    TwoAdditiveFuzzyMeasure,
    build_dialogue_matrix,
    build_risk_matrix,
    load_membership,
    partition_cohesion,
    write_membership,
)
from .synth import SyntheticSpec, generate

DEFAULT_GAMMAS = (0.5, 0.4, 0.3, 0.2, 0.1, 0.0)


class ConfigError(Exception):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _gammas(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"bad gamma list {text!r}") from None


# key -> (converter, default). Keys double as flag names with '-' for '_'.
OPTIONS = {
    "graph": (str, None),
    "membership": (str, None),
    "partition": (str, None),
    "grouping": (str, "max"),
    "overlap": (str, "product"),
    "negation": (str, "standard"),
    "symmetrizer": (str, "mean"),
    "kind": (str, DIALOGUE),
    "gamma": (float, 0.5),
    "gammas": (_gammas, list(DEFAULT_GAMMAS)),
    "seed": (int, 0),
    "rescale": (_bool, False),
    "binarize": (_bool, False),
    "largest_component": (_bool, False),
    "norm_mode": (str, "positive-pairs"),
    "out": (str, None),
    "jobs": (int, 1),
    "oracle": (_bool, False),
    "format": (str, "dot"),
    "nodes_per_block": (int, 30),
    "blocks": (int, 2),
    "intra": (float, 0.3),
    "inter": (float, 0.05),
    "sharpness": (float, 10.0),
    "noise": (float, 0.05),
    "crisp": (_bool, False),
}


@dataclass
class RunConfig:
    graph: str | None = None
    membership: str | None = None
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    blend: BlendSpec = field(default_factory=lambda: BlendSpec(0.5))
    gammas: list = field(default_factory=lambda: list(DEFAULT_GAMMAS))
    seed: int = 0
    norm_mode: str = "positive-pairs"
    out: str | None = None
    kind: str = DIALOGUE
    binarize: bool = False
    largest_component: bool = False
    jobs: int = 1


def read_config_file(path) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    parser.read_string("[run]\n" + text)
    out = {}
    for key, value in parser["run"].items():
        norm = key.replace("-", "_")
        if norm not in OPTIONS:
            raise ConfigError(f"unknown config key {key!r}")
        out[norm] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge command line, config file and defaults into plain typed values."""
    from_file = read_config_file(args.config) if getattr(args, "config", None) else {}
    values = {}
    for key, (convert, default) in OPTIONS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            raw = cli_value
        elif key in from_file:
            raw = from_file[key]
        else:
            values[key] = default
            continue
        try:
            values[key] = convert(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return values


def run_config(values: dict) -> RunConfig:
    if values["norm_mode"] not in NORM_MODES:
        raise ConfigError(f"unknown norm mode {values['norm_mode']!r}")
    if values["kind"] not in (DIALOGUE, RISK):
        raise ConfigError(f"unknown kind {values['kind']!r}")
    for key in ("graph", "membership"):
        if values[key] is not None and not Path(values[key]).is_file():
            raise ConfigError(f"{key} file not found: {values[key]}")
    return RunConfig(
        graph=values["graph"],
        membership=values["membership"],
        operators=OperatorConfig(values["grouping"], values["overlap"], values["negation"], values["symmetrizer"]),
        blend=BlendSpec(values["gamma"], values["rescale"]),
        gammas=values["gammas"],
        seed=values["seed"],
        norm_mode=values["norm_mode"],
        out=values["out"],
        kind=values["kind"],
        binarize=values["binarize"],
        largest_component=values["largest_component"],
        jobs=values["jobs"],
    )


# -- artifact helpers ------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _require(value, name):
    if value is None:
        raise ConfigError(f"--{name.replace('_', '-')} is required")
    return value


def _load_inputs(cfg: RunConfig) -> tuple[WeightedGraph, MembershipProfile]:
    g = load_edge_list(_require(cfg.graph, "graph"), binarize=cfg.binarize)
    prof = load_membership(_require(cfg.membership, "membership"), g.node_ids)
    if cfg.largest_component:
        sub = largest_component(g)
        prof = prof.subset([g.index_of(x) for x in sub.node_ids])
        g = sub
    return g, prof


def partition_document(g: WeightedGraph, p: Partition, seed: int, gamma, q: float, pol) -> dict:
    return {
        "seed": seed,
        "gamma": gamma,
        "communities": {str(cid): [str(x) for x in members] for cid, members in p.labelled(g.node_ids).items()},
        "Q": q,
        "pol": pol,
    }


def cohesion_document(p: Partition, prof: MembershipProfile, ops: OperatorConfig, norm_mode: str, seed: int) -> dict:
    try:
        doc = partition_cohesion(p, prof, ops, norm_mode).to_dict()
    except UndefinedScoreError:
        doc = {"mode": norm_mode, "communities": [], "pol": None, "pol_by_mode": {m: None for m in NORM_MODES}}
    doc["seed"] = seed
    doc["operators"] = ops.to_dict()
    return doc


# -- subcommands -------------------------------------------------------------------


def cmd_detect(values: dict) -> int:
    cfg = run_config(values)
    out = Path(_require(cfg.out, "out"))
    g, prof = _load_inputs(cfg)
    f = feature_matrix(prof, cfg.operators, cfg.kind)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        part, trace = polarization_louvain(g, f, cfg.blend, cfg.seed)
    q = modularity(blend(g, f, cfg.blend), part)
    cohesion = cohesion_document(part, prof, cfg.operators, cfg.norm_mode, cfg.seed)
    doc = partition_document(g, part, cfg.seed, cfg.blend.gamma, q, cohesion["pol"])
    doc.update(rescale=cfg.blend.rescale, kind=cfg.kind, operators=cfg.operators.to_dict(), passes=len(trace.all_passes()))
    _write(out / "partition.json", _dump(doc))
    _write(out / "cohesion.json", _dump(cohesion))
    _write(out / "graph.dot", f"// seed={cfg.seed} gamma={cfg.blend.gamma:g}\n" + to_dot(g, part))
    return 0


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def cmd_sweep(values: dict) -> int:
    cfg = run_config(values)
    if not cfg.gammas:
        raise ConfigError("gamma list is empty")
    out = Path(_require(cfg.out, "out"))
    g, prof = _load_inputs(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        report = gamma_sweep(g, prof, cfg.operators, cfg.gammas, cfg.seed, cfg.blend.rescale,
                             cfg.norm_mode, cfg.kind, cfg.jobs)
    rows_json = []
    lines = [["gamma", "n_communities_gt1", "pol", "Q"]]
    for row in report.all_rows():
        sub = out / ("baseline" if row.gamma is None else f"gamma_{row.gamma:g}")
        cohesion = row.cohesion.to_dict() | {"seed": cfg.seed, "operators": cfg.operators.to_dict()}
        _write(sub / "partition.json", _dump(partition_document(g, row.partition, cfg.seed, row.gamma, row.q, row.pol)))
        _write(sub / "cohesion.json", _dump(cohesion))
        gamma_cell = "louvain" if row.gamma is None else f"{row.gamma:g}"
        lines.append([gamma_cell, str(row.n_communities_gt1), _fmt(row.pol), _fmt(row.q)])
        rows_json.append({
            "label": row.label,
            "gamma": row.gamma,
            "n_communities_gt1": row.n_communities_gt1,
            "jdj": row.cohesion.jdj_vector(),
            "sizes": [c.size for c in row.cohesion.communities],
            "pol": row.pol,
            "Q": row.q,
        })
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(lines)
    _write(out / "sweep.json", _dump({
        "seed": cfg.seed,
        "operators": cfg.operators.to_dict(),
        "norm_mode": cfg.norm_mode,
        "rescale": cfg.blend.rescale,
        "kind": cfg.kind,
        "rows": rows_json,
    }))
    return 0


def _read_partition(path, node_ids) -> Partition:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        communities = doc["communities"]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read partition {path}: {exc}") from None
    index = {str(x): i for i, x in enumerate(node_ids)}
    labels = [-1] * len(index)
    unknown = []
    for cid, members in communities.items():
        for label in members:
            if str(label) not in index:
                unknown.append(str(label))
            else:
                labels[index[str(label)]] = cid
    missing = [str(x) for x, c in zip(node_ids, labels) if c == -1]
    if unknown or missing:
        parts = []
        if missing:
            parts.append(f"partition misses node(s): {', '.join(missing)}")
        if unknown:
            parts.append(f"partition has unknown node(s): {', '.join(unknown)}")
        raise MembershipError("; ".join(parts), missing, unknown)
    return Partition.from_assignment(labels)


def cmd_score(values: dict) -> int:
    cfg = run_config(values)
    prof = load_membership(_require(cfg.membership, "membership"))
    part = _read_partition(_require(values["partition"], "partition"), prof.node_ids)
    report = partition_cohesion(part, prof, cfg.operators, cfg.norm_mode).to_dict()
    report["operators"] = cfg.operators.to_dict()
    text = _dump(report)
    if cfg.out:
        _write(Path(cfg.out), text)
    sys.stdout.write(text)
    return 0


def cmd_synth(values: dict) -> int:
    spec = SyntheticSpec(
        nodes_per_block=values["nodes_per_block"],
        blocks=values["blocks"],
        intra_prob=values["intra"],
        inter_prob=values["inter"],
        pole_sharpness=values["sharpness"],
        seed=values["seed"],
        crisp=values["crisp"],
        noise=values["noise"],
    )
    out = Path(_require(values["out"], "out"))
    g, prof, block = generate(spec)
    if g.n == 0:
        raise EmptyGraphError("generated graph has no edges")
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(g, out / "edges.csv")
    write_membership(prof, out / "membership.csv")
    _write(out / "synth.json", _dump({"spec": spec.to_dict(), "n_nodes": g.n, "n_edges": g.n_edges,
                                      "blocks": {str(x): int(b) for x, b in zip(g.node_ids, block)}}))
    return 0


def cmd_shapley(values: dict) -> int:
    cfg = run_config(values)
    if cfg.graph:
        g = load_edge_list(cfg.graph)
        prof = load_membership(_require(cfg.membership, "membership"), g.node_ids)
    else:
        prof = load_membership(_require(cfg.membership, "membership"))
    builder = build_dialogue_matrix if cfg.kind == DIALOGUE else build_risk_matrix
    m = TwoAdditiveFuzzyMeasure(builder(prof, cfg.operators), prof.node_ids)
    if values["oracle"]:
        by_player = shapley_brute_force(m, range(m.n))
        vector = [by_player[i] for i in range(m.n)]
        method = "brute-force"
    else:
        vector = shapley_closed_form(m)
        method = "closed-form"
    doc = {
        "kind": cfg.kind,
        "method": method,
        "operators": cfg.operators.to_dict(),
        "values": {str(label): v for label, v in zip(prof.node_ids, vector)},
    }
    text = _dump(doc)
    if cfg.out:
        _write(Path(cfg.out), text)
    sys.stdout.write(text)
    return 0


def cmd_export(values: dict) -> int:
    g = load_edge_list(_require(values["graph"], "graph"), binarize=values["binarize"])
    part = _read_partition(values["partition"], g.node_ids) if values["partition"] else None
    if values["largest_component"]:
        if part is not None:
            raise ConfigError("--largest-component cannot be combined with --partition")
        g = largest_component(g)
    if values["format"] == "dot":
        text = to_dot(g, part)
    elif values["format"] == "json":
        text = dump_node_link(g, part)
    else:
        raise ConfigError(f"unknown export format {values['format']!r}")
    if values["out"]:
        _write(Path(values["out"]), text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "score": cmd_score,
    "synth": cmd_synth,
    "shapley": cmd_shapley,
    "export": cmd_export,
}


# -- argument parsing ---------------------------------------------------------------


def _flag(parser, key, help, **kw):
    parser.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=help, **kw)


def _bool_flag(parser, key, help):
    parser.add_argument("--" + key.replace("_", "-"), dest=key, action="store_const", const=True,
                        default=None, help=help)


def _shared(parser):
    _flag(parser, "graph", "edge CSV with header source,target[,weight]")
    _flag(parser, "membership", "membership CSV with header node,eta_a,eta_b")
    _flag(parser, "grouping", "grouping operator", choices=sorted(GROUPINGS))
    _flag(parser, "overlap", "overlap operator", choices=sorted(OVERLAPS))
    _flag(parser, "negation", "negation operator", choices=sorted(NEGATIONS))
    _flag(parser, "symmetrizer", "symmetrizer for the associated graph", choices=sorted(SYMMETRIZERS))
    _flag(parser, "kind", "measure feeding F (default dialogue)", choices=[DIALOGUE, RISK])
    _flag(parser, "gamma", "weight of A in M = gamma*A + (1-gamma)*F", type=float)
    _flag(parser, "gammas", "comma-separated gamma list for sweeps")
    _flag(parser, "seed", "seed of the node-visiting permutations", type=int)
    _bool_flag(parser, "rescale", "scale F to the total weight of A before blending")
    _bool_flag(parser, "binarize", "replace accumulated edge weights by 1")
    _bool_flag(parser, "largest_component", "cluster only the largest connected component")
    _flag(parser, "norm_mode", "per-community normalizer for pol(P)", choices=list(NORM_MODES))
    _flag(parser, "out", "output directory (detect, sweep, synth) or file")
    parser.add_argument("--config", default=None, help="flat key = value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarlouvain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="run Polarization Louvain once")
    _shared(detect)

    sweep = sub.add_parser("sweep", help="run a gamma sweep plus a Louvain baseline")
    _shared(sweep)
    _flag(sweep, "jobs", "worker processes for sweep points", type=int)

    score = sub.add_parser("score", help="pol(P) of an existing partition")
    _shared(score)
    _flag(score, "partition", "partition JSON as written by detect")

    synth = sub.add_parser("synth", help="generate a planted two-pole graph")
    _flag(synth, "nodes_per_block", "nodes per block", type=int)
    _flag(synth, "blocks", "number of blocks", type=int)
    _flag(synth, "intra", "edge probability inside a block", type=float)
    _flag(synth, "inter", "edge probability across blocks", type=float)
    _flag(synth, "sharpness", "Beta concentration of memberships (>= 1)", type=float)
    _flag(synth, "noise", "half-width of the uniform noise on eta_b", type=float)
    _bool_flag(synth, "crisp", "exact 0/1 memberships")
    _flag(synth, "seed", "generator seed", type=int)
    _flag(synth, "out", "output directory")
    synth.add_argument("--config", default=None, help="flat key = value config file")

    shapley = sub.add_parser("shapley", help="Shapley vector of the dialogue or risk measure")
    _shared(shapley)
    _bool_flag(shapley, "oracle", "use the permutation brute force (at most 10 nodes)")

    export = sub.add_parser("export", help="write the graph as DOT or node-link JSON")
    _shared(export)
    _flag(export, "partition", "optional partition JSON used to colour nodes")
    _flag(export, "format", "dot or json", choices=["dot", "json"])
    return parser


def _fail(code: str, reason: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "reason": reason}) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values = resolve(args)
        return COMMANDS[args.command](values)
    except DegeneratePolarizationError as exc:
        return _fail("degenerate-polarization", str(exc), 3)
    except DegenerateDialogueError as exc:
        return _fail("degenerate-dialogue", str(exc), 3)
    except DegenerateMeasureError as exc:
        return _fail("degenerate-measure", str(exc), 3)
    except UndefinedScoreError as exc:
        return _fail("undefined-score", str(exc), 3)
    except MembershipError as exc:
        return _fail("membership", str(exc), 2)
    except EdgeListError as exc:
        return _fail("edge-list", str(exc), 2)
    except (EmptyGraphError, UndefinedModularityError) as exc:
        return _fail("empty-graph", str(exc), 2)
    except SizeLimitError as exc:
        return _fail("size-limit", str(exc), 2)
    except (ConfigError, ContractViolation, configparser.Error) as exc:
        return _fail("config", str(exc), 2)
    except OSError as exc:
        return _fail("io", f"{exc.filename}: {exc.strerror}", 2)


if __name__ == "__main__":
    sys.exit(main())
