"""Seeded batch experiments on generated graphs, with CSV and JSON output."""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from .dynamics import Schedule, parse_initial, run_dynamics
from .equilibria import DEFAULT_CAP, analyze
from .game import (GameInstance, InadmissibleError, Model, admissible, format_rational,
                   parse_rational, social_cost)
from .graph import (Graph, KleinbergParams, make_complete, make_cycle, make_kleinberg, make_path,
                    make_random, make_star, read_edgelist)

log = logging.getLogger(__name__)

KINDS = ("sweep_F", "convergence", "wof_exact", "numsec")
DEFAULT_F_GRID = tuple(f"{i}/10" for i in range(11))
CSV_HEADER = ("experiment", "trial", "seed", "side", "q", "alpha", "n", "C", "L", "F", "model",
              "converged", "passes", "changes", "social_cost", "num_secure", "wof", "poa")

MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master: int, *indices: int) -> int:
    """Fold indices into the master seed with splitmix64, one step per index."""
    h = _splitmix64(master & MASK64)
    for i in indices:
        h = _splitmix64(h ^ (i & MASK64))
    return h


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "sweep_F"
    graph: dict = field(default_factory=lambda: {"generator": "kleinberg", "side": 10,
                                                 "q": 1, "alpha": 2})
    C: str = "1"
    L: str = "4"
    F_grid: tuple[str, ...] = DEFAULT_F_GRID
    models: tuple[str, ...] = ("absolute", "relative")
    trials: int = 100
    master_seed: int = 0
    schedule: str = "round-robin"
    initial: str = "all-insecure"
    max_passes: int | None = None
    cap: int = DEFAULT_CAP
    workers: int = 1
    dry_run: bool = False
    csv: str | None = None
    json: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        object.__setattr__(self, "F_grid", tuple(str(f) for f in self.F_grid))
        object.__setattr__(self, "models", tuple(Model(m).value for m in self.models))
        object.__setattr__(self, "graph", dict(self.graph))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.master_seed <= MASK64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        for f in self.F_grid:
            parse_rational(f)
        parse_rational(self.C), parse_rational(self.L)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        d = dict(d)
        for key in ("C", "L"):
            if key in d:
                d[key] = str(d[key])
        return cls(**d)

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror}") from exc
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["F_grid"] = list(self.F_grid)
        d["models"] = list(self.models)
        return d


def build_graph(spec: dict, seed: int) -> Graph:
    spec = dict(spec)
    gen = spec.pop("generator", None)
    try:
        if gen == "kleinberg":
            return make_kleinberg(KleinbergParams(
                side=int(spec.pop("side", 10)), long_range_per_node=int(spec.pop("q", 1)),
                clustering_exponent=float(spec.pop("alpha", 2)), seed=seed))
        if gen in ("complete", "star", "cycle", "path"):
            n = int(spec.pop("n"))
            return {"complete": make_complete, "star": make_star, "cycle": make_cycle,
                    "path": make_path}[gen](n)
        if gen == "random":
            return make_random(int(spec.pop("n")), float(spec.pop("p")), seed)
        if gen == "file":
            return read_edgelist(spec.pop("path"))
    finally:
        if spec:
            raise ValueError(f"unknown graph keys for {gen!r}: {sorted(spec)}")
    raise ValueError(f"unknown graph generator {gen!r}")


@dataclass
class ResultRow:
    experiment: str
    trial: int
    seed: int
    side: int | None
    q: int | None
    alpha: float | None
    n: int
    C: Fraction
    L: Fraction
    F: Fraction
    model: str
    converged: bool
    passes: int
    changes: int
    social_cost: Fraction
    num_secure: int
    wof: Fraction | None = None
    poa: Fraction | None = None
    final: str | None = None


def _graph_columns(spec: dict):
    if spec.get("generator") == "kleinberg":
        return int(spec.get("side", 10)), int(spec.get("q", 1)), float(spec.get("alpha", 2))
    return None, None, None


def _run_one(args) -> ResultRow:
    cfg, fi, mi, trial = args
    F = parse_rational(cfg.F_grid[fi])
    model = cfg.models[mi]
    seed = trial_seed(cfg.master_seed, fi, mi, trial)
    g = build_graph(cfg.graph, seed)
    C, L = parse_rational(cfg.C), parse_rational(cfg.L)
    if not admissible(g.node_count, C, L):
        raise InadmissibleError(f"need L/n < C <= L for n={g.node_count}, got C={C}, L={L}")
    inst = GameInstance(g, C, L, F, model)
    initial = parse_initial(cfg.initial, g.node_count, seed)
    trace = run_dynamics(inst, initial, Schedule.parse(cfg.schedule, seed),
                         max_passes=cfg.max_passes, record_costs=False)
    final = trace.final
    row = ResultRow(cfg.kind, trial, seed, *_graph_columns(cfg.graph), g.node_count, C, L, F,
                    model, trace.converged, trace.passes, trace.changes,
                    social_cost(inst, final), final.num_secure, final=str(final))
    if cfg.kind == "wof_exact":
        report = analyze(inst, cap=cfg.cap)
        row.wof, row.poa = report.wof, report.poa
    return row


def experiment_tasks(cfg: ExperimentConfig):
    return [(cfg, fi, mi, t) for fi in range(len(cfg.F_grid)) for mi in range(len(cfg.models))
            for t in range(cfg.trials)]


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """One row per (F, model, trial), in that nesting order.

    Each row's seed mixes the master seed with its grid indices, so extending
    the grid never changes existing rows.

    Non-converged runs are kept with ``converged=False``.
    """
    if cfg.dry_run:
        return []
    tasks = experiment_tasks(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(_run_one, tasks, chunksize=8))
    else:
        rows = [_run_one(t) for t in tasks]
    bad = sum(not r.converged for r in rows)
    if bad:
        log.warning("%d of %d runs did not converge", bad, len(rows))
    return rows


def replay_row(cfg: ExperimentConfig, row: ResultRow):
    """Regenerate a row's instance and trace from its seed and the config."""
    fi = [parse_rational(f) for f in cfg.F_grid].index(row.F)
    mi = cfg.models.index(row.model)
    seed = trial_seed(cfg.master_seed, fi, mi, row.trial)
    g = build_graph(cfg.graph, seed)
    inst = GameInstance(g, parse_rational(cfg.C), parse_rational(cfg.L), row.F, row.model)
    trace = run_dynamics(inst, parse_initial(cfg.initial, g.node_count, seed),
                         Schedule.parse(cfg.schedule, seed), max_passes=cfg.max_passes,
                         record_costs=False)
    return inst, trace


# ---------------------------------------------------------------------------
# Serialization

def _dec(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def _csv_values(r: ResultRow) -> list[str]:
    return [r.experiment, str(r.trial), str(r.seed),
            "" if r.side is None else str(r.side), "" if r.q is None else str(r.q),
            _dec(r.alpha), str(r.n), _dec(r.C), _dec(r.L), _dec(r.F), r.model,
            "true" if r.converged else "false", str(r.passes), str(r.changes),
            _dec(r.social_cost), str(r.num_secure), _dec(r.wof), _dec(r.poa)]


def dumps_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(_csv_values(r))
    return buf.getvalue()


def _write(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def emit_csv(rows, path) -> None:
    _write(path, dumps_csv(rows))


def parse_csv(text: str) -> list[ResultRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out = []
    for rec in reader:
        opt = lambda k, conv: None if rec[k] == "" else conv(rec[k])  # noqa: E731
        out.append(ResultRow(
            rec["experiment"], int(rec["trial"]), int(rec["seed"]), opt("side", int),
            opt("q", int), opt("alpha", float), int(rec["n"]), parse_rational(rec["C"]),
            parse_rational(rec["L"]), parse_rational(rec["F"]), rec["model"],
            rec["converged"] == "true", int(rec["passes"]), int(rec["changes"]),
            parse_rational(rec["social_cost"]), int(rec["num_secure"]),
            opt("wof", parse_rational), opt("poa", parse_rational)))
    return out


def _num(x):
    if x is None:
        return None
    return {"exact": format_rational(x), "approx": float(x)}


def row_to_dict(r: ResultRow) -> dict:
    d = asdict(r)
    for k in ("C", "L", "F", "social_cost", "wof", "poa"):
        d[k] = _num(getattr(r, k))
    return d


def row_from_dict(d: dict) -> ResultRow:
    d = dict(d)
    for k in ("C", "L", "F", "social_cost", "wof", "poa"):
        d[k] = None if d[k] is None else parse_rational(d[k]["exact"])
    return ResultRow(**d)


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def emit_json(report, path) -> None:
    """Write a report (anything with ``to_dict``, or a plain dict) as JSON."""
    doc = report.to_dict() if hasattr(report, "to_dict") else report
    _write(path, dumps_json(doc))


def experiment_document(cfg: ExperimentConfig, rows) -> dict:
    return {
        "config": cfg.to_dict(),
        "metadata": {"columns": list(CSV_HEADER), "schedule": cfg.schedule,
                     "initial": cfg.initial, "F_grid": list(cfg.F_grid),
                     "seed_mixing": "splitmix64 over (master_seed, F index, model index, trial)"},
        "rows": [row_to_dict(r) for r in rows],
    }


def write_outputs(cfg: ExperimentConfig, rows, csv_path=None, json_path=None) -> None:
    csv_path = csv_path or cfg.csv
    json_path = json_path or cfg.json
    if csv_path:
        emit_csv(rows, csv_path)
    if json_path:
        emit_json(experiment_document(cfg, rows), json_path)
