"""Command-line front end: ``ivsets <command> MODEL [options]``.

Exit codes: 0 on success (a NOT-FOUND verdict included), 1 on a domain
error, 2 on a usage error or unreadable file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path as FsPath
from typing import Sequence

from . import iv
from .diagram import CausalDiagram, Parametrization
from .dsl import ModelDocument, load_model
from .errors import IdentificationError
from .io import export_covariance, export_dataset, load_covariance, load_dataset
from .paths import DEFAULT_PATH_CAP, d_separates, enumerate_unblocked_paths
from .simulate import estimate_covariance, sample_data, sample_parametrization
from .wright import CovarianceModel, implied_covariance, standardize


class UsageError(Exception):
    pass


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _read(path: str) -> str:
    try:
        return FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _model(path: str) -> ModelDocument:
    try:
        return load_model(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _theta(doc: ModelDocument, seed: int | None) -> Parametrization:
    """Model's own values when complete, else a seeded draw."""
    theta = doc.parametrization()
    if theta is not None:
        return theta
    if seed is None:
        raise UsageError("model has unvalued edges; pass --seed to draw a parametrization")
    return sample_parametrization(doc.diagram, seed)


def _infer_y(G: CausalDiagram, targets: Sequence[str]) -> str:
    common = set.intersection(*(set(G.children(x)) for x in targets))
    if len(common) != 1:
        found = ", ".join(sorted(common, key=G.index)) or "none"
        raise UsageError(f"cannot infer --y from the targets (common children: {found})")
    return common.pop()


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# -- commands ------------------------------------------------------------------


def cmd_dsep(a: argparse.Namespace) -> int:
    G = _model(a.model).diagram
    verdict = d_separates(G, _names(a.given), a.x, a.y)
    if a.json:
        _emit_json({"x": a.x, "y": a.y, "given": _names(a.given), "d_separated": verdict})
    else:
        print(f"d-separated: {'true' if verdict else 'false'}")
    return 0


def cmd_paths(a: argparse.Namespace) -> int:
    G = _model(a.model).diagram
    paths = enumerate_unblocked_paths(G, a.x, a.y, _names(a.given), a.path_cap)
    if a.json:
        _emit_json([str(p) for p in paths])
    else:
        for p in paths:
            print(p)
        print(f"{len(paths)} unblocked path(s)")
    return 0


def cmd_civ(a: argparse.Namespace) -> int:
    G = _model(a.model).diagram
    if a.z:
        W = tuple(_names(a.given))
        ok = iv.check_conditional_iv(G, a.z, W, a.x, a.y)
        found = (a.z, W) if ok else None
    else:
        found = iv.find_conditional_iv(G, a.x, a.y, a.max_w)
    out: dict = {"edge": f"{a.x}->{a.y}", "found": found is not None}
    if found is not None:
        z, W = found
        out.update(instrument=z, conditioning=list(W))
        if a.cov:
            cov = load_covariance(_read(a.cov))
            out["estimate"] = iv.conditional_iv_estimate(cov, z, W, a.x, a.y)
    if a.json:
        _emit_json(out)
    elif found is None:
        print(f"no conditional instrument for {a.x}->{a.y}")
    else:
        line = f"conditional instrument for {a.x}->{a.y}: {found[0]} given {{{', '.join(found[1])}}}"
        if "estimate" in out:
            line += f"; estimate {out['estimate']!r}"
        print(line)
    return 0


def cmd_ivset(a: argparse.Namespace) -> int:
    G = _model(a.model).diagram
    targets = _names(a.targets)
    y = a.y or _infer_y(G, targets)
    triples = iv.find_instrumental_set(G, targets, y, a.budget, a.max_w, a.path_cap)
    if a.json:
        _emit_json(None if triples is None else [t.to_json() for t in triples])
    elif triples is None:
        print(f"no instrumental set for {', '.join(f'{x}->{y}' for x in targets)}")
    else:
        for t in triples:
            print(f"{t.target}->{y}: {t.describe()}")
    return 0


def _identify_cov(a: argparse.Namespace, doc: ModelDocument) -> tuple[CovarianceModel, dict]:
    sources = [s for s in (a.cov, a.data, a.simulate) if s is not None]
    if len(sources) != 1:
        raise UsageError("identify needs exactly one of --cov, --data or --simulate SEED")
    if a.cov:
        return load_covariance(_read(a.cov)), {}
    if a.data:
        return estimate_covariance(load_dataset(_read(a.data)), standardize=False), {}
    G = doc.diagram
    theta = doc.parametrization() or sample_parametrization(G, a.simulate)
    sigma = implied_covariance(G, theta)
    truth = standardize(G, theta).coefficients
    if a.n:
        sigma = estimate_covariance(sample_data(sigma, a.n, a.simulate), standardize=False)
    return sigma, {"seed": a.simulate, "truth": truth}


def cmd_identify(a: argparse.Namespace) -> int:
    doc = _model(a.model)
    G = doc.diagram
    targets = _names(a.targets)
    if not targets:
        raise UsageError("--targets needs at least one node")
    y = a.y or _infer_y(G, targets)
    cov, sim = _identify_cov(a, doc)
    results = iv.identify_effects(
        G, targets, y, cov, tol=a.tol, max_w=a.max_w, path_cap=a.path_cap, budget=a.budget
    )
    report = {}
    for eid, r in results.items():
        entry = r.to_json()
        if sim:
            entry["seed"] = sim["seed"]
            entry["truth"] = sim["truth"][eid]
        report[eid] = entry
    if a.json:
        _emit_json(report)
        return 0
    for eid, entry in report.items():
        status = entry["status"]
        if status == iv.IDENTIFIED:
            line = f"{eid}: {status} {entry['value']!r}"
            if "value_original_scale" in entry:
                line += f" (original scale {entry['value_original_scale']!r})"
        elif status == iv.NEAR_SINGULAR:
            line = f"{eid}: {status} (det Q = {entry['det_q']:.3g})"
        else:
            line = f"{eid}: {status}"
        if "truth" in entry:
            line += f" [truth {entry['truth']!r}, seed {entry['seed']}]"
        print(line)
        for t in entry.get("triples", []):
            print(f"    {t['instrument']} | {{{', '.join(t['conditioning'])}}} | {t['path']}")
    return 0


def cmd_oracle(a: argparse.Namespace) -> int:
    doc = _model(a.model)
    theta = _theta(doc, a.seed)
    sigma = implied_covariance(doc.diagram, theta)
    if a.standardize:
        sigma = sigma.standardized()
    _write(export_covariance(sigma), a.out)
    return 0


def cmd_simulate(a: argparse.Namespace) -> int:
    doc = _model(a.model)
    if a.seed is None:
        raise UsageError("simulate needs --seed")
    theta = _theta(doc, a.seed)
    sigma = implied_covariance(doc.diagram, theta)
    _write(export_dataset(sample_data(sigma, a.n, a.seed)), a.out)
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ivsets", description="Graphical identification of direct effects in linear SEMs."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, fn, help: str, json_output: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("model", help="model file")
        if json_output:
            p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=fn)
        return p

    def search_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--max-w", type=int, default=iv.DEFAULT_MAX_W, help="largest conditioning set")
        p.add_argument("--path-cap", type=int, default=DEFAULT_PATH_CAP)
        p.add_argument("--budget", type=int, default=iv.DEFAULT_BUDGET)

    p = command("dsep", cmd_dsep, "test d-separation")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--given", default="", help="comma-separated conditioning set")

    p = command("paths", cmd_paths, "list unblocked paths")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--given", default="")
    p.add_argument("--path-cap", type=int, default=DEFAULT_PATH_CAP)

    p = command("civ", cmd_civ, "check or find a conditional instrument for x -> y")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", help="instrument to check; searched for when omitted")
    p.add_argument("--given", default="", help="conditioning set for --z")
    p.add_argument("--cov", help="covariance CSV for an estimate")
    p.add_argument("--max-w", type=int, default=iv.DEFAULT_MAX_W)

    p = command("ivset", cmd_ivset, "search for an instrumental set")
    p.add_argument("--targets", required=True, help="comma-separated causes of y")
    p.add_argument("--y")
    search_opts(p)

    p = command("identify", cmd_identify, "identify the direct effects targets -> y")
    p.add_argument("--targets", required=True)
    p.add_argument("--y")
    p.add_argument("--cov", help="covariance CSV")
    p.add_argument("--data", help="dataset CSV; its sample covariance is used")
    p.add_argument("--simulate", type=int, metavar="SEED", help="use the model's exact covariance")
    p.add_argument("--n", type=int, help="with --simulate, draw n samples instead")
    p.add_argument("--tol", type=float, default=iv.DEFAULT_TOL)
    search_opts(p)

    p = command("oracle", cmd_oracle, "export the exact implied covariance as CSV", False)
    p.add_argument("--seed", type=int)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--out")

    p = command("simulate", cmd_simulate, "draw a Gaussian dataset as CSV", False)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--out")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ivsets: error: {exc}", file=sys.stderr)
        return 2
    except IdentificationError as exc:
        print(f"ivsets: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"ivsets: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
