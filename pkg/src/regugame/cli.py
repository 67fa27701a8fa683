"""Command-line entry point: ``regugame {solve,thresholds,sweep,bimatrix,demo}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .game import ExtensiveGame, InvalidGame, as_number
from .models import (
    SCENARIOS,
    DeterrenceInfeasible,
    InvalidParams,
    MarketParams,
    baseline,
    build_game,
    thresholds,
)
from .policy import (
    SweepSpec,
    demo_report,
    fmt_decimal,
    fmt_exact,
    fmt_md,
    md_table,
    penalty_sweep,
    sweep,
    sweep_table,
    to_csv,
)
from .solvers import SUPPLIER_RETAILER, Bimatrix2x2, backward_induction, solve_bimatrix_2x2

FORMATS = ("md", "csv", "json")
EXIT_OK, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    params: Path | None = None
    scenario: str | None = None
    format: str = "md"
    tie_break: str = "first"
    grid: tuple | None = None
    parameter: str = "r"
    out: str = "-"


def parse_grid(text: str) -> tuple:
    """``start:stop:steps`` -> ``steps`` evenly spaced exact values, endpoints included."""
    try:
        start, stop, steps = text.split(":")
        start, stop, steps = as_number(start), as_number(stop), int(steps)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"bad grid {text!r}; expected start:stop:steps") from None
    if steps < 1:
        raise InputError("grid steps must be >= 1")
    if steps == 1:
        return (start,)
    h = (stop - start) / (steps - 1)
    return tuple(start + k * h for k in range(steps))


def _plain(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return x


def _dump_json(obj) -> str:
    def conv(o):
        if isinstance(o, dict):
            return {str(k): conv(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [conv(v) for v in o]
        return _plain(o)

    return json.dumps(conv(obj), indent=2, sort_keys=False) + "\n"


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from None


def _load_params(cfg: CliConfig) -> MarketParams:
    if cfg.params is None:
        return baseline()
    doc = _read_json(cfg.params)
    if not isinstance(doc, dict):
        raise InputError("parameter file must hold a JSON object")
    return MarketParams.from_dict(doc)


def _need_scenario(cfg: CliConfig) -> str:
    if cfg.scenario is None:
        raise InputError(f"--scenario is required; choose from {', '.join(SCENARIOS)}")
    return cfg.scenario


# -- commands -------------------------------------------------------------------

def cmd_solve(cfg: CliConfig) -> str:
    doc = _read_json(cfg.params) if cfg.params else None
    if isinstance(doc, dict) and "root" in doc and "players" in doc:
        try:
            g = ExtensiveGame.from_dict(doc)
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed game document: {exc}") from None
    else:
        params = MarketParams.from_dict(doc) if doc is not None else baseline()
        g = build_game(params, _need_scenario(cfg))
    sol = backward_induction(g, cfg.tie_break)
    order = list(g.iter_nodes())
    if cfg.format == "json":
        return _dump_json({
            "players": list(g.players),
            "path": list(sol.path(g)),
            "root_value": sol.root_value,
            "chosen": dict(sol.chosen),
            "node_values": {n: sol.node_values[n] for n in order},
            "tie_log": list(sol.tie_log),
        })
    header = ["node", "kind", "chosen"] + [f"value_{p}" for p in g.players]
    rows = []
    for n in order:
        node = g[n]
        kind = type(node).__name__.lower()
        rows.append([n, kind, sol.chosen.get(n, "")] + [fmt_decimal(v) for v in sol.node_values[n]])
    if cfg.format == "csv":
        return to_csv(header, rows)
    lines = [
        f"equilibrium path: {' -> '.join(sol.path(g)) or '(none)'}",
        "root value: (" + ", ".join(fmt_md(v) for v in sol.root_value) + ")",
        f"ties: {', '.join(sol.tie_log) if sol.tie_log else 'none'}",
        "",
        md_table(header, rows),
    ]
    return "\n".join(lines) + "\n"


def cmd_thresholds(cfg: CliConfig) -> str:
    params = _load_params(cfg)
    rep = thresholds(params, _need_scenario(cfg))
    named = [("p_min", rep.p_min), ("m_max", rep.m_max), ("t_min", rep.t_min), ("r_bound", rep.r_bound)]
    named = [(k, v) for k, v in named if v is not None]
    if cfg.format == "json":
        return _dump_json({
            "scenario": rep.scenario,
            **dict(named),
            "conditions": [{"name": c.name, "inequality": c.text, "satisfied": c.satisfied}
                           for c in rep.conditions],
            "verdict": rep.verdict.value,
            "subcase_verdicts": {k: v.value for k, v in rep.subcase_verdicts},
            "notes": list(rep.notes),
        })
    rows = [[c.name, c.text, str(c.satisfied).lower()] for c in rep.conditions]
    if cfg.format == "csv":
        return to_csv(["condition", "inequality", "satisfied"], rows)
    summary = ", ".join(f"{k} = {fmt_md(v) if v != float('inf') else 'inf'}" for k, v in named)
    lines = [f"scenario: {rep.scenario}", summary, f"verdict: {rep.verdict.value}"]
    lines += [f"verdict ({k}): {v.value}" for k, v in rep.subcase_verdicts]
    lines += ["", md_table(["condition", "inequality", "satisfied"], rows)]
    lines += [f"note: {n}" for n in rep.notes]
    return "\n".join(lines) + "\n"


DEFAULT_GRIDS = {"r": "0.2:1.0:5", "p": "0:16:5", "m": "0:8:5", "t": "0:8:5"}


def cmd_sweep(cfg: CliConfig) -> str:
    params = _load_params(cfg)
    grid = cfg.grid if cfg.grid is not None else parse_grid(DEFAULT_GRIDS[cfg.parameter])
    try:
        spec = SweepSpec(cfg.parameter, grid, params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rows = penalty_sweep(spec) if cfg.parameter == "r" else sweep(spec)
    header, body = sweep_table(spec, rows)
    if cfg.format == "csv":
        return to_csv(header, body)
    if cfg.format == "json":
        return _dump_json([dict(zip(header, row)) for row in body])
    return md_table(header, body) + "\n"


def cmd_bimatrix(cfg: CliConfig) -> str:
    if cfg.params is None:
        game = SUPPLIER_RETAILER
    else:
        try:
            game = Bimatrix2x2.from_dict(_read_json(cfg.params))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed bimatrix document: {exc}") from None
    sol = solve_bimatrix_2x2(game)
    pure = [(game.row_actions[i], game.col_actions[j]) for i, j in sol.pure_nash]
    if cfg.format == "json":
        mixed = None
        if sol.mixed is not None:
            mixed = {"row_prob": sol.mixed.row_prob, "col_prob": sol.mixed.col_prob,
                     "row_prob_exact": fmt_exact(sol.mixed.row_prob),
                     "col_prob_exact": fmt_exact(sol.mixed.col_prob),
                     "expected": sol.mixed.expected}
        return _dump_json({"pure_nash": [list(p) for p in pure], "mixed": mixed,
                           "degenerate": sol.degenerate})
    if cfg.format == "csv":
        rows = [["pure", r, c, "", ""] for r, c in pure]
        if sol.mixed is not None:
            m = sol.mixed
            rows.append(["mixed", game.row_actions[0], game.col_actions[0],
                         fmt_decimal(m.row_prob), fmt_decimal(m.col_prob)])
        return to_csv(["kind", "row_action", "col_action", "row_prob", "col_prob"], rows)
    head = "no pure NE" if not pure else "pure NE: " + ", ".join(f"({r}, {c})" for r, c in pure)
    if sol.mixed is None:
        tail = "degenerate, no mixed equilibrium" if sol.degenerate else "no interior mixed equilibrium"
        return f"{head}; {tail}\n"
    m = sol.mixed
    lines = [
        f"{head}; mixed: row {float(m.row_prob):.4f}, col {float(m.col_prob):.4f}",
        f"P({game.row_player} plays {game.row_actions[0]}) = {fmt_exact(m.row_prob)}",
        f"P({game.col_player} plays {game.col_actions[0]}) = {fmt_exact(m.col_prob)}",
        "expected payoffs: (" + ", ".join(fmt_md(v) for v in m.expected) + ")",
    ]
    return "\n".join(lines) + "\n"


def cmd_demo(cfg: CliConfig) -> str:
    rep = demo_report(_load_params(cfg))
    if cfg.format == "csv":
        return rep.csv["min_penalty"]
    if cfg.format == "json":
        d = rep.data
        return _dump_json({
            "honest": d["honest"],
            "min_penalty": [{"r": r, "p_min": p, "p_min_exact": fmt_exact(p)} for r, p in d["min_penalty"]],
            "buy_condition": d["buy_condition"],
            "r_bound": d["r_bound"],
            "r_feasible": d["r_feasible"],
        })
    return rep.markdown


COMMANDS = {
    "solve": cmd_solve,
    "thresholds": cmd_thresholds,
    "sweep": cmd_sweep,
    "bimatrix": cmd_bimatrix,
    "demo": cmd_demo,
}


def run(cfg: CliConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        text = COMMANDS[cfg.command](cfg)
    except (InputError, InvalidParams, InvalidGame, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except DeterrenceInfeasible as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    if cfg.out in (None, "-", "stdout"):
        stdout.write(text)
    else:
        Path(cfg.out).write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    default_fmt = os.environ.get("REGUGAME_FORMAT", "md")
    if default_fmt not in FORMATS:
        default_fmt = "md"
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", type=Path, help="input JSON (market parameters, game or bimatrix)")
    common.add_argument("--format", choices=FORMATS, default=default_fmt)
    common.add_argument("--out", default="-", help="output file, '-' for stdout")

    ap = argparse.ArgumentParser(prog="regugame", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="backward induction on a scenario or raw game")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--tie-break", choices=("first", "lex"), default="first")

    p = sub.add_parser("thresholds", parents=[common], help="closed-form deterrence thresholds")
    p.add_argument("--scenario", choices=SCENARIOS, required=True)

    p = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    p.add_argument("--parameter", choices=("r", "p", "m", "t"), default="r")
    p.add_argument("--grid", help="start:stop:steps (steps = number of points)")

    sub.add_parser("bimatrix", parents=[common], help="pure and mixed equilibria of a 2x2 game")
    sub.add_parser("demo", parents=[common], help="numerical-case report")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        grid = parse_grid(args.grid) if getattr(args, "grid", None) else None
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = CliConfig(
        command=args.command,
        params=args.params,
        scenario=getattr(args, "scenario", None),
        format=args.format,
        tie_break=getattr(args, "tie_break", "first"),
        grid=grid,
        parameter=getattr(args, "parameter", "r"),
        out=args.out,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
