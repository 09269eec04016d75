"""Command-line interface: ``gftlab <subcommand> [flags]``.

Every subcommand writes a sealed JSON report (or a series file for
``invert``) into the output directory.  Exit codes: 0 on completion, 2 for a
failing verdict under ``--strict``, 64 for usage errors, 1 for other errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import grunsky as gr
from .claims import claim_registry, run_claims
from .config import FIELDS, load_config, parse_value
from .errors import GFTError, UsageError
from .experiments import ExtremalParams, extremal_fk, theorem1_experiment, theorem2_experiment
from .functional import FunctionalSpec, extremal_scaffold, parametric_search
from .reports import dump, seal, validate
from .schwarzian import LaurentTail, ahlfors_weill_admissible, becker_norm, bnorm, schwarzian
from .series import geometric, identity, koebe, lagrange_invert, read_series, write_series
from .univalence import biunivalence_certificates

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_input(spec, order):
    """``koebe``, ``identity``, ``fk:k[:angle]``, ``geometric:r`` or a series file."""
    name, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if name == "koebe" and not args:
            return koebe(order)
        if name == "identity" and not args:
            return identity(order)
        if name == "fk" and 1 <= len(args) <= 2:
            angle = float(args[1]) if len(args) == 2 else 0.0
            return extremal_fk(ExtremalParams(float(args[0]), complex(np.exp(1j * angle))), order)
        if name == "geometric" and len(args) == 1:
            return geometric(order, float(args[0]))
    except ValueError as exc:
        raise UsageError(f"bad input spec {spec!r}: {exc}") from None
    if Path(spec).is_file():
        return read_series(spec)
    raise UsageError(f"input {spec!r} is neither a known map nor a readable series file")


def _config_flags():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="key=value configuration file (flags override it)")
    parent.add_argument("--strict", action="store_true", help="exit 2 if any verdict is fail")
    for name, f in FIELDS.items():
        flag = "--" + name.replace("_", "-")
        parent.add_argument(flag, dest=name, default=None, metavar=type(f.default).__name__.upper(), help=f"default {f.default!r}")
    return parent


def build_parser():
    parent = _config_flags()
    p = _Parser(prog="gftlab", description="Numerical checks for univalent-function computations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grunsky", parents=[parent], help="Grunsky matrix, form norm and derived quantities")
    g.add_argument("--input", required=True)
    g.add_argument("--csv", help="also export the matrix as CSV")

    s = sub.add_parser("schwarzian", parents=[parent], help="Schwarzian, hyperbolic norm and exterior norm")
    s.add_argument("--input", required=True)

    i = sub.add_parser("invert", parents=[parent], help="compositional inverse series")
    i.add_argument("--input", required=True)
    i.add_argument("--output", help="series file to write (default: <out>/<name>.inverse.txt)")

    v = sub.add_parser("verify", parents=[parent], help="biunivalence certificate")
    v.add_argument("--input", required=True)

    b = sub.add_parser("ball", parents=[parent], help="seeded Monte-Carlo experiments")
    b.add_argument("--experiment", choices=("ball", "covering"), default="ball")

    d = sub.add_parser("distortion", parents=[parent], help="coefficient functional search and extremal data")
    d.add_argument("--functional", required=True, help="monomial file: lines 're im : n^p ...'")
    d.add_argument("--alphabet", choices=("a", "b"), default="a")

    c = sub.add_parser("claims", help="claim registry")
    csub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    csub.add_parser("list", help="list registered claims")
    run = csub.add_parser("run", parents=[parent], help="run claims and write one report per claim")
    pick = run.add_mutually_exclusive_group(required=True)
    pick.add_argument("--all", action="store_true")
    pick.add_argument("--id", action="append", dest="ids")
    return p


def _config_from(ns):
    overrides = {name: parse_value(name, getattr(ns, name)) for name in FIELDS if getattr(ns, name, None) is not None}
    return load_config(getattr(ns, "config", None), overrides)


def _write(cfg, name, kind, body):
    doc = seal(kind, body, cfg.canonical())
    validate(doc)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    path.write_text(dump(doc))
    return path


def _stem(spec):
    return Path(spec).stem if Path(spec).is_file() else spec.replace(":", "_")


def cmd_grunsky(ns, cfg):
    n = cfg.order
    f = parse_input(ns.input, 2 * n + 1)
    g = gr.grunsky_matrix(f, n)
    bound = gr.coefficient_bound_check(g)
    body = {
        "input": ns.input,
        "grunsky_order": n,
        "form_norm": gr.grunsky_form_norm(g),
        "coefficient_sup": gr.coefficient_sup(g),
        "seq_norm": gr.seq_norm(g),
        "scaled_radius": gr.scaled_radius(g),
        "coefficient_bound": bound.to_dict(),
    }
    if ns.csv:
        gr.write_csv(ns.csv, g)
    path = _write(cfg, f"grunsky_{_stem(ns.input)}", "grunsky", body)
    print(f"{path}: form norm {body['form_norm']:.12g}, coefficient bound {bound.verdict}")
    return [bound.verdict]


def cmd_schwarzian(ns, cfg):
    f = parse_input(ns.input, cfg.order)
    s = schwarzian(f)
    norm, where = bnorm(s, cfg.grid(), return_argmax=True)
    aw = ahlfors_weill_admissible(f, cfg.k, cfg.grid())
    body = {
        "input": ns.input,
        "schwarzian": s.phi.coeffs,
        "bnorm": norm,
        "argmax": complex(where),
        "ahlfors_weill": aw.to_dict(),
    }
    try:
        body["becker_norm_exterior"] = becker_norm(LaurentTail.from_disk_map(f))
    except GFTError as exc:
        body["becker_norm_exterior_error"] = f"{type(exc).__name__}: {exc}"
    path = _write(cfg, f"schwarzian_{_stem(ns.input)}", "schwarzian", body)
    print(f"{path}: hyperbolic norm {norm:.12g}")
    return [aw.verdict]


def cmd_invert(ns, cfg):
    f = parse_input(ns.input, cfg.order)
    g = lagrange_invert(f)
    target = Path(ns.output) if ns.output else Path(cfg.out) / f"{_stem(ns.input)}.inverse.txt"
    target.parent.mkdir(parents=True, exist_ok=True)
    write_series(target, g)
    print(target)
    return []


def cmd_verify(ns, cfg):
    f = parse_input(ns.input, cfg.order)
    cert = biunivalence_certificates(f, cfg.verifier())
    path = _write(cfg, f"certificate_{_stem(ns.input)}", "certificate", cert.to_dict())
    print(f"{path}: {cert.overall}")
    return ["fail" if cert.overall == "refuted" else "pass"]


def cmd_ball(ns, cfg):
    if ns.experiment == "ball":
        rep = theorem1_experiment(cfg.k, cfg.trials, cfg.seed, cfg.experiment())
        path = _write(cfg, f"ball_k{cfg.k}_seed{cfg.seed}", "experiment", rep.to_dict())
        print(f"{path}: {rep.aggregates['completed']}/{rep.trials} trials completed")
        return ["fail" if rep.aggregates["netanyahu_violations"] else "pass"]
    rep = theorem2_experiment(cfg.k, cfg.experiment(), seed=cfg.seed)
    path = _write(cfg, f"covering_k{cfg.k}_seed{cfg.seed}", "claim", rep.to_dict())
    print(f"{path}: {rep.verdict}")
    return [rep.verdict]


def cmd_distortion(ns, cfg):
    try:
        text = Path(ns.functional).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read functional file: {exc}") from None
    j = FunctionalSpec.parse(text, ns.alphabet)
    if j.alphabet != "a":
        raise UsageError("the search evaluates functionals of f; use alphabet 'a'")
    search = parametric_search(j, cfg.k, cfg.budget, cfg.seed, cfg.experiment())
    body = extremal_scaffold(j, cfg.k, cfg.budget, cfg.seed, cfg=cfg.experiment())
    body["trace"] = search["trace"]
    path = _write(cfg, f"distortion_{Path(ns.functional).stem}", "distortion", body)
    print(f"{path}: best |J| {search['best_value']:.12g}")
    return []


def cmd_claims(ns, cfg):
    verdicts = []
    for rep in run_claims(cfg, None if ns.all else ns.ids):
        path = _write(cfg, f"claim_{rep.claim_id}", "claim", rep.to_dict())
        print(f"{rep.verdict:13s} {rep.claim_id}  ({path})")
        verdicts.append(rep.verdict)
    return verdicts


COMMANDS = {
    "grunsky": cmd_grunsky,
    "schwarzian": cmd_schwarzian,
    "invert": cmd_invert,
    "verify": cmd_verify,
    "ball": cmd_ball,
    "distortion": cmd_distortion,
}


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "claims" and ns.action == "list":
        for d in claim_registry():
            print(f"{d.claim_id:32s} {d.paper_anchor}")
        return EXIT_OK
    try:
        cfg = _config_from(ns)
        handler = cmd_claims if ns.command == "claims" else COMMANDS[ns.command]
        verdicts = handler(ns, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gftlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GFTError as exc:
        print(f"gftlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if ns.strict and "fail" in verdicts:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
