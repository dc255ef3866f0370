"""Command line front end: ``sdgame <command> ...``.

Exit codes: 0 success, 1 negative verdict or inconclusive, 2 infeasible SDP,
3 bad input, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import constructions, dantzig, files, nash, sdp, zerosum
from .errors import ContractViolation, NumericalFailure, UnsupportedConfiguration
from .games import SemidefiniteGame, embed_bimatrix

EXIT_OK, EXIT_NEGATIVE, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3, 4
ZERO_SUM_TOL = 1e-12


class Report:
    def __init__(self, command: str, tol: float):
        self.command = command
        self.tol = tol
        self.inputs = {}
        self.result = {}
        self.residuals = {}
        self.exit_code = EXIT_OK
        self.summary = ""

    def add_input(self, path):
        self.inputs[str(path)] = files.digest(path)

    def to_dict(self, wall_time=None) -> dict:
        d = {"command": self.command, "inputs": self.inputs, "tol": self.tol,
             "result": self.result, "residuals": self.residuals, "exit_code": self.exit_code}
        if wall_time is not None:
            d["wall_time"] = wall_time
        return d


# -- commands -------------------------------------------------------------------


def _game(rep, path) -> SemidefiniteGame:
    rep.add_input(path)
    return files.load_game(path)


def cmd_solve_zerosum(args, rep):
    g = _game(rep, args.game)
    if np.max(np.abs(g.A + g.B)) > ZERO_SUM_TOL:
        raise ContractViolation("game is not zero-sum (B differs from -A)")
    sol = zerosum.solve_zero_sum(g.A, rep.tol)
    rep.result = {"value": sol.V, "X": sol.X_star, "Y": sol.Y_star, "T": sol.T, "S": sol.S}
    rep.residuals = sol.residuals()
    rep.summary = f"value={sol.V:.10g}"


def cmd_verify_nash(args, rep):
    g = _game(rep, args.game)
    rep.add_input(args.X)
    rep.add_input(args.Y)
    X = files.load_strategy(args.X, "X")
    Y = files.load_strategy(args.Y, "Y")
    cert = nash.verify_nash(g, X, Y, rep.tol)
    rep.result = cert.to_dict()
    rep.residuals = {"P": cert.P_residual, "Q": cert.Q_residual, "gap_1": cert.gaps[0], "gap_2": cert.gaps[1]}
    rep.exit_code = EXIT_OK if cert.verdict else EXIT_NEGATIVE
    rep.summary = f"verdict={'nash' if cert.verdict else 'not-nash'} u={cert.u:.10g} v={cert.v:.10g}"


def cmd_best_response(args, rep):
    g = _game(rep, args.game)
    rep.add_input(args.strategy)
    Z = files.load_strategy(args.strategy)
    if args.player == 1:
        R, val = nash.best_response(g.A, Z)
    else:
        R, val = nash.best_response_column(g.B, Z)
    rep.result = {"player": args.player, "response": R, "value": val}
    rep.summary = f"value={val:.10g}"


def cmd_dantzig(args, rep):
    rep.add_input(args.sdp)
    p = files.load_sdp(args.sdp)
    if not p.is_modified_form:
        if not args.modify:
            raise ContractViolation("SDP has equality constraints; pass --modify to convert them")
        p = sdp.to_modified_form(p)
    g = dantzig.build_dantzig_game(p, args.order)
    if args.action == "build":
        rep.result = files.dantzig_to_dict(g)
        rep.summary = f"blocks={list(g.blocks)}"
        return
    sol = dantzig.solve_symmetric_game(g, rep.tol)
    ext = dantzig.extract_sdp_solution(sol, p, rep.tol)
    rep.result = {"y_bar": sol.y_bar, "X_bar": sol.X_bar, "t_bar": sol.t_bar, "extraction": ext.to_dict()}
    rep.residuals = ext.residuals
    rep.exit_code = {dantzig.Case.OPTIMAL_PAIR: EXIT_OK, dantzig.Case.INFEASIBLE_SOMEWHERE: EXIT_INFEASIBLE,
                     dantzig.Case.INCONCLUSIVE: EXIT_NEGATIVE}[ext.case]
    rep.summary = f"case={ext.case.value} t_bar={ext.t_bar:.10g} gap={ext.gap:.10g}"


def _parse_name(name: str):
    """Map a generator name such as ``hybrid:0.1`` or ``family:4:1.0`` to a game or SDP."""
    head, *rest = name.split(":")
    try:
        if head == "plus-one" and not rest:
            return constructions.plus_one_game()
        if head == "nondiagonal" and not rest:
            return constructions.nondiagonal_game()
        if head == "hybrid" and len(rest) == 1:
            return constructions.hybrid_game(float(rest[0]))
        if head == "five" and len(rest) == 1:
            return constructions.five_equilibria_game(float(rest[0]))
        if head == "family" and len(rest) == 2:
            return constructions.many_nash_family(int(rest[0]), float(rest[1]))
        if head == "zero" and len(rest) == 2:
            m, n = int(rest[0]), int(rest[1])
            return SemidefiniteGame.zero_sum(np.zeros((m, m, n, n)), name="zero")
        if head == "dantzig-example" and not rest:
            return constructions.dantzig_example_sdp()
    except ValueError as exc:
        raise ContractViolation(f"bad parameters in {name!r}: {exc}") from None
    raise ContractViolation(f"unknown generator {name!r}")


def cmd_generate(args, rep):
    obj = _parse_name(args.name)
    if isinstance(obj, sdp.SdpProblem):
        data = files.sdp_to_dict(obj)
    else:
        data = files.game_to_dict(obj)
    text = files.dumps(data)
    if args.output:
        Path(args.output).write_text(text)
        rep.result = {"written": str(args.output), "name": args.name}
    else:
        rep.result = data
    rep.summary = f"generated {args.name}"


def cmd_enumerate(args, rep):
    head, *rest = args.family.split(":")
    if head != "family" or len(rest) != 2:
        raise ContractViolation(f"expected family:<n>:<c>, got {args.family!r}")
    try:
        n, c = int(rest[0]), float(rest[1])
    except ValueError as exc:
        raise ContractViolation(str(exc)) from None
    out = constructions.enumerate_block_equilibria(n, c, tol=rep.tol)
    profiles = []
    for prof, cert in out:
        profiles.append({"choice": [None if ch is None else int(ch) for ch in prof.choice],
                         "verified": cert.verdict, "u": cert.u, "v": cert.v,
                         "alpha": prof.weights.alpha, "beta": prof.weights.beta})
    k = len(profiles)
    ok = sum(p["verified"] for p in profiles)
    rep.summary = f"count={k} verified={ok}"
    rep.result = {"count": k, "verified": ok, "summary": rep.summary, "profiles": profiles}
    rep.exit_code = EXIT_OK if ok == k else EXIT_NEGATIVE


def cmd_embed_bimatrix(args, rep):
    rep.add_input(args.bimatrix)
    d = files.read_json(args.bimatrix)
    if not isinstance(d, dict) or "A" not in d:
        raise ContractViolation("bimatrix file needs key A (and B or \"negA\")")
    A = np.array(d["A"], dtype=float)
    Bd = d.get("B", files.NEG_A)
    B = -A if Bd == files.NEG_A else np.array(Bd, dtype=float)
    g = embed_bimatrix(A, B, name=str(d.get("name", "embedded")))
    data = files.game_to_dict(g)
    if args.output:
        Path(args.output).write_text(files.dumps(data))
        rep.result = {"written": str(args.output), "m": g.m, "n": g.n}
    else:
        rep.result = data
    rep.summary = f"embedded {g.m}x{g.n} bimatrix game"


# -- parser ---------------------------------------------------------------------


def _common(defaults: bool) -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=sdp.DEFAULT_TOL if defaults else sup,
                   help="numerical tolerance (default 1e-8)")
    p.add_argument("--output", "-o", default=None if defaults else sup, help="output file")
    p.add_argument("--json", action="store_true", default=False if defaults else sup,
                   help="print the full JSON report")
    p.add_argument("--timing", action="store_true", default=False if defaults else sup,
                   help="include wall time in the report")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    ap = argparse.ArgumentParser(prog="sdgame", description="Semidefinite games toolkit.",
                                 parents=[_common(True)])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-zerosum", parents=[common], help="value and optimal strategies")
    s.add_argument("game")
    s.set_defaults(func=cmd_solve_zerosum)

    s = sub.add_parser("verify-nash", parents=[common], help="certify a strategy pair")
    s.add_argument("game")
    s.add_argument("X")
    s.add_argument("Y")
    s.set_defaults(func=cmd_verify_nash)

    s = sub.add_parser("best-response", parents=[common], help="best rank-1 response")
    s.add_argument("game")
    s.add_argument("strategy", help="the opponent's strategy")
    s.add_argument("--player", type=int, choices=(1, 2), default=1, help="player who responds")
    s.set_defaults(func=cmd_best_response)

    s = sub.add_parser("dantzig", parents=[common], help="Dantzig game of an SDP")
    s.add_argument("action", choices=("build", "solve"))
    s.add_argument("sdp")
    s.add_argument("--modify", action="store_true", help="convert equality constraints to 'geq' pairs")
    s.add_argument("--order", choices=dantzig.ORDERS, default="diag-first", help="flattening order")
    s.set_defaults(func=cmd_dantzig)

    s = sub.add_parser("generate", parents=[common], help="write an example game or SDP")
    s.add_argument("name", help="plus-one, nondiagonal, hybrid:<eps>, five:<c>, family:<n>:<c>, "
                                "zero:<m>:<n> or dantzig-example")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("enumerate", parents=[common], help="block equilibria of the family game")
    s.add_argument("family", help="family:<n>:<c>")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("embed-bimatrix", parents=[common], help="diagonal embedding of a bimatrix game")
    s.add_argument("bimatrix", help='JSON with "A" and "B" (or "negA")')
    s.set_defaults(func=cmd_embed_bimatrix)
    return ap


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    rep = Report(args.command, args.tol)
    start = time.perf_counter()
    try:
        args.func(args, rep)
    except (ContractViolation, UnsupportedConfiguration) as exc:
        rep.exit_code = EXIT_INPUT
        rep.result = {"error": str(exc)}
        rep.summary = f"error: {exc}"
    except NumericalFailure as exc:
        rep.exit_code = EXIT_NUMERICAL
        rep.result = {"error": str(exc)}
        rep.summary = f"numerical failure: {exc}"
    wall = time.perf_counter() - start if args.timing else None
    report = rep.to_dict(wall)
    if args.json:
        sys.stdout.write(files.dumps(report))
    else:
        print(rep.summary)
    if args.output and args.command not in ("generate", "embed-bimatrix"):
        Path(args.output).write_text(files.dumps(report))
    return rep.exit_code, report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
