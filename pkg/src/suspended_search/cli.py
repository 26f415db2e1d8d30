"""Command-line interface: ``suspended-search <verb> ...``.

Verbs
  match      classify profile pairs and print same-user components
  sweep      graph statistics across a grid of match thresholds
  train      fit a suspension, match or refollow model with lambda selection
  instance   build a search instance for one suspended user
  search     compare query policies on an instance
  simulate   Monte Carlo cost of a single policy
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .learn import ConstantModel, Dataset, DegenerateDataError, LinearModel
from .model import SearchDomainError, query_count
from .pipeline import POLICY_NAMES, build_instance, compare_policies, train_with_selection
from .policy import as_policy, policy_for
from .sim import simulate, simulate_given_truth
from .similarity import DEFAULT_PAIR_CAP, MatchModel, components, score_pairs, threshold_sweep


@dataclass(frozen=True)
class Workspace:
    """Root directory against which relative paths resolve, plus default output folders."""

    root: Path

    @property
    def models(self) -> Path:
        return self.root / "models"

    @property
    def instances(self) -> Path:
        return self.root / "instances"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.root / p

    def existing(self, path) -> Path:
        p = self.resolve(path)
        if not p.is_file():
            raise FileNotFoundError(f"cannot read {p}")
        return p


# --- output ----------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}" if np.isfinite(v) else str(v)
    return "" if v is None else str(v)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "delimited":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(r.get(c)) if isinstance(r.get(c), float) else _cell(r.get(c)) for c in columns])
        return buf.getvalue()
    cells = [[_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


# --- verbs -----------------------------------------------------------------

def _match_model(ws: Workspace, path):
    if path is None:
        return MatchModel()
    model, _ = io.load_model(ws.existing(path))
    if isinstance(model, MatchModel):
        return model
    if isinstance(model, LinearModel) and model.coefficients.size == 4:
        return MatchModel(model.intercept, tuple(model.coefficients))
    raise io.FormatError("match model must be a match model or a 4-feature linear model")


def cmd_match(args, ws: Workspace, out) -> int:
    profiles = io.read_profiles(ws.existing(args.profiles))
    model = _match_model(ws, args.model)
    t = model.threshold if args.threshold is None else args.threshold
    scored = score_pairs(profiles, model, args.blocking, args.pair_cap)
    comps = components(scored.graph(t))
    edges = [{"account_a": a, "account_b": b, "probability": p} for a, b, p in scored.pairs if p >= t]
    comp_rows = [{"component": k, "size": len(c), "accounts": " ".join(map(str, c))} for k, c in enumerate(comps)]
    out.write(render(edges, ["account_a", "account_b", "probability"], args.format))
    out.write("\n")
    out.write(render(comp_rows, ["component", "size", "accounts"], args.format))
    if args.out:
        io.write_json(ws.resolve(args.out), {
            "threshold": t,
            "edges": [[e["account_a"], e["account_b"], e["probability"]] for e in edges],
            "components": comps,
        })
    return 0


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(max(n, 0))]
    return [float(v) for v in text.split(",") if v.strip()]


SWEEP_COLUMNS = ["threshold", "edges", "connected_account_count", "giant_component_size",
                 "component_count", "average_clustering"]


def cmd_sweep(args, ws: Workspace, out) -> int:
    profiles = io.read_profiles(ws.existing(args.profiles))
    model = _match_model(ws, args.model)
    rows = threshold_sweep(profiles, model, parse_grid(args.grid), args.blocking, args.pair_cap)
    dicts = [r.__dict__ for r in rows]
    out.write(render(dicts, SWEEP_COLUMNS, args.format))
    if args.out:
        io.atomic_write_text(ws.resolve(args.out), render(dicts, SWEEP_COLUMNS, "delimited"))
    return 0


def cmd_train(args, ws: Workspace, out) -> int:
    X, names, labels, groups = io.read_matrix(ws.existing(args.data))
    if labels is None:
        raise io.FormatError(f"{args.data}: needs a 'label' column")
    if args.group_split and groups is None:
        raise io.FormatError(f"{args.data}: --group-split needs a 'group' column")
    normalize = None if args.normalize is None else args.normalize == "zscore"
    result = train_with_selection(
        Dataset(X, labels, names), args.kind, args.lam, tuple(args.split), args.seed,
        groups if args.group_split else None, normalize,
    )
    target = ws.resolve(args.out) if args.out else ws.models / f"{args.kind}.json"
    io.save_model(target, result.model, result.scaler, args.kind)
    rows = [{"lambda": lam, "validation_auc": auc, "selected": "*" if lam == result.lam else ""}
            for lam, auc in result.validation_auc.items()]
    out.write(render(rows, ["lambda", "validation_auc", "selected"], args.format))
    out.write(f"selected lambda {result.lam!r}; test AUC {_cell(result.test_auc)}; model written to {target}\n")
    if args.roc_out and result.test_roc is not None:
        roc = result.test_roc
        pts = [{"threshold": float(t), "fpr": float(f), "tpr": float(p)}
               for t, f, p in zip(roc.thresholds, roc.fpr, roc.tpr)]
        io.atomic_write_text(ws.resolve(args.roc_out), render(pts, ["threshold", "fpr", "tpr"], "delimited"))
    return 0


def cmd_instance(args, ws: Workspace, out) -> int:
    edges = io.read_edges(ws.existing(args.edges))
    accounts = io.read_accounts(ws.existing(args.accounts))
    interactions = io.read_interactions(ws.existing(args.interactions)) if args.interactions else None
    if args.model is not None:
        model, scaler = io.load_model(ws.existing(args.model))
    elif args.constant_phi is not None:
        model, scaler = ConstantModel(args.constant_phi), None
    else:
        raise ValueError("give --model or --constant-phi")
    inst = build_instance(args.user, edges, accounts, model, scaler, interactions,
                          args.rho0, args.rho_bar, args.page_size)
    target = ws.resolve(args.out) if args.out else ws.instances / f"{args.user}.json"
    io.save_instance(target, inst)
    rows = [{"id": f.id, "followers": f.follower_count, "phi": f.phi,
             "queries": query_count(f.follower_count, inst.page_size)} for f in inst.friends]
    out.write(render(rows, ["id", "followers", "phi", "queries"], args.format))
    out.write(f"instance written to {target}\n")
    return 0


def parse_order(instance, text: str) -> tuple:
    """Map a comma list of friend ids onto instance ids.

    A full query sequence is used as given. A list naming each friend once
    is expanded so each friend's pages are queried back to back.
    """
    lookup = {str(f.id): f.id for f in instance.friends}
    try:
        ids = [lookup[t.strip()] for t in text.split(",") if t.strip()]
    except KeyError as exc:
        raise SearchDomainError(f"--order names unknown friend {exc.args[0]!r}") from None
    if len(set(ids)) == len(ids) == len(instance.friends):
        counts = instance.query_counts
        ids = [i for i in ids for _ in range(counts[i])]
    return as_policy(instance, ids).sequence


def _load_truth(ws, path):
    return io.truth_from_dict(io.read_json(ws.existing(path))) if path else None


def cmd_search(args, ws: Workspace, out) -> int:
    inst = io.load_instance(ws.existing(args.instance))
    truth = _load_truth(ws, args.truth)
    order = parse_order(inst, args.order) if args.order else None
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    unknown = [p for p in policies if p not in POLICY_NAMES]
    if unknown:
        raise SearchDomainError(f"unknown policies {unknown}; choose from {', '.join(POLICY_NAMES)}")
    rows = compare_policies(inst, policies, truth, args.runs, args.random_count, args.seed, order)
    cols = ["policy", "expected_cost"]
    if truth is not None:
        cols.append("actual_cost")
    if args.runs:
        cols += ["sim_mean", "sim_stderr"]
    out.write(render(rows, cols, args.format))
    if args.out:
        io.write_json(ws.resolve(args.out), {"seed": args.seed, "rows": rows})
    return 0


def cmd_simulate(args, ws: Workspace, out) -> int:
    inst = io.load_instance(ws.existing(args.instance))
    truth = _load_truth(ws, args.truth)
    seq = parse_order(inst, args.order) if args.order else policy_for(inst, args.policy, args.seed).policy.sequence
    if truth is None:
        report = simulate(inst, seq, args.runs, args.seed)
    else:
        report = simulate_given_truth(inst, seq, truth, args.runs, args.seed)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    out.write(text)
    if args.out:
        io.atomic_write_text(ws.resolve(args.out), text)
    return 0


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # flags are accepted before or after the verb; only the top level sets defaults
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--seed", type=int, default=d(0), help="seed for every random choice (default 0)")
        g.add_argument("--workspace", default=d("."), help="directory that relative paths resolve against")
        g.add_argument("--format", choices=("table", "delimited"), default=d("table"))
        return g

    common = global_flags(False)
    late = global_flags(True)

    parser = argparse.ArgumentParser(prog="suspended-search", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, help=help_, parents=[late])
        p.set_defaults(func=fn)
        return p

    for name, fn, help_ in (("match", cmd_match, "classify profile pairs"),
                            ("sweep", cmd_sweep, "threshold sweep table")):
        p = verb(name, fn, help_)
        p.add_argument("profiles")
        p.add_argument("--model", default=None)
        p.add_argument("--blocking", action="store_true", default=False, help="compare only pairs sharing a 3-gram")
        p.add_argument("--pair-cap", type=int, default=DEFAULT_PAIR_CAP)
        p.add_argument("--out", default=None)
        if name == "match":
            p.add_argument("--threshold", type=float, default=None)
        else:
            p.add_argument("--grid", default="0.05:0.95:0.05", help="start:stop:step or comma list")

    p = verb("train", cmd_train, "fit a classifier")
    p.add_argument("kind", choices=("suspension", "match", "refollow"))
    p.add_argument("data", help="CSV of features with a 'label' column and optional 'group' column")
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[0.1, 1.0, 10.0])
    p.add_argument("--split", type=float, nargs=3, default=[0.5, 0.25, 0.25], metavar=("TRAIN", "VAL", "TEST"))
    p.add_argument("--group-split", action="store_true", default=False)
    p.add_argument("--normalize", choices=("zscore", "none"), default=None,
                   help="feature scaling (default: zscore for refollow, none otherwise)")
    p.add_argument("--out", default=None)
    p.add_argument("--roc-out", default=None)

    p = verb("instance", cmd_instance, "build a search instance")
    p.add_argument("user")
    p.add_argument("--edges", required=True)
    p.add_argument("--accounts", required=True)
    p.add_argument("--interactions", default=None)
    p.add_argument("--model", default=None, help="refollow model file")
    p.add_argument("--constant-phi", type=float, default=None, help="use this phi for every friend")
    p.add_argument("--rho0", type=float, default=1.0)
    p.add_argument("--rho-bar", type=float, default=0.0)
    p.add_argument("--page-size", type=int, default=5000)
    p.add_argument("--out", default=None)

    p = verb("search", cmd_search, "compare policies")
    p.add_argument("instance")
    p.add_argument("--policies", default=",".join(POLICY_NAMES))
    p.add_argument("--truth", default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--random-count", type=int, default=500)
    p.add_argument("--order", default=None, help="comma list of friend ids evaluated as an extra 'forced' row")
    p.add_argument("--out", default=None)

    p = verb("simulate", cmd_simulate, "simulate one policy")
    p.add_argument("instance")
    p.add_argument("--policy", choices=POLICY_NAMES, default="optimal")
    p.add_argument("--order", default=None)
    p.add_argument("--truth", default=None)
    p.add_argument("--runs", type=int, default=10000)
    p.add_argument("--out", default=None)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    ws = Workspace(Path(args.workspace))
    try:
        return args.func(args, ws, out)
    except (OSError, ValueError, KeyError) as exc:
        # FormatError, SearchDomainError and DegenerateDataError are ValueErrors
        kind = "error"
        if isinstance(exc, DegenerateDataError):
            kind = "refused"
        print(f"suspended-search {args.verb}: {kind}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
