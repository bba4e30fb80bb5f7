"""Command-line front end.

JSON results go to stdout, a one-line summary to stderr.  Exit codes:
0 success, 2 bad input, 3 a mathematical check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .blowup import BlowupError, BlowupPath
from .points import Direction, RationalPoint
from .solid_torus import SolidTorusError, circle_mas, flow_flat_solid, sf_solid_torus, validate_cycle
from .symplectic import LagrangianFrame, LagrangianPath, SymplecticError, SymplecticSpace, maslov_index
from .torus_bundle import (
    BundleError,
    Mod4Violation,
    Monodromy,
    RepPoint,
    check_central_obstruction,
    enumerate_reps,
    find_curve,
    pair_vector,
    sf_mod4,
    sf_mod4_for_classes,
)
from .torus_spectrum import spectrum

EXIT_INPUT = 2
EXIT_MATH = 3


class InputError(ValueError):
    pass


class MathFailure(RuntimeError):
    def __init__(self, message: str, payload: dict):
        super().__init__(message)
        self.payload = payload


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    tolerance: float = 1e-10
    cutoff: int = 4
    output: Path | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be positive")
        if self.cutoff < 0:
            raise InputError("cutoff must be nonnegative")


def _load_json(text: str) -> dict:
    p = Path(text)
    try:
        raw = p.read_text() if p.exists() else text
        return json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"could not read JSON from {text!r}: {exc}") from exc


# ---------------------------------------------------------------- subcommands

def cmd_reps(args, cfg: RunConfig) -> tuple[dict | list, str]:
    B = Monodromy.parse(args.B)
    reps = enumerate_reps(B)
    out = {"B": B.to_json(), "det_B_plus_I": B.det_plus_identity,
           "classes": [{"phi": r.to_json(), "irreducible": not r.reducible} for r in reps]}
    n_irr = sum(1 for r in reps if not r.reducible)
    return out, f"{len(reps)} classes, {n_irr} irreducible, det(B+I) = {B.det_plus_identity}"


def cmd_sf(args, cfg: RunConfig) -> tuple[dict, str]:
    B = Monodromy.parse(args.B)
    phi, psi = RepPoint.parse(args.phi), RepPoint.parse(args.psi)
    try:
        if args.search:
            res = sf_mod4_for_classes(B, phi, psi, args.arc_policy, args.rs_shift, window=args.search)
        else:
            res = sf_mod4(B, phi, psi, args.arc_policy, args.rs_shift)
    except Mod4Violation as exc:
        raise MathFailure(str(exc), exc.result.to_json()) from exc
    return res.to_json(), (f"sf_solid = {res.sf_solid}, sf_X = {res.sf_x_mod4} mod 4, "
                           f"corrections = {res.corrections_mod4} mod 4, total = {res.total_mod4} mod 4")


def cmd_sf_solid(args, cfg: RunConfig) -> tuple[dict, str]:
    path = BlowupPath.from_json(_load_json(args.path))
    res = sf_solid_torus(path)
    return res.to_json(), f"sf = {res.sf} from {len(res.crossings)} crossings"


def cmd_spectrum(args, cfg: RunConfig) -> tuple[dict, str]:
    rep = spectrum(RationalPoint.parse(args.point), cfg.cutoff)
    return rep.to_json(), f"kernel dimension {rep.kernel_dim} over {len(rep.blocks)} blocks"


def _frame(space: SymplecticSpace, data) -> LagrangianFrame:
    return LagrangianFrame(space, np.array(data, dtype=float))


def cmd_maslov(args, cfg: RunConfig) -> tuple[dict, str]:
    if args.check:
        th = Direction.parse(args.theta)
        if args.check == "flow-flat-solid":
            v = flow_flat_solid(th)
        else:
            v = circle_mas(th, order=args.order)
        return {"check": args.check, "theta": th.label(), "value": v}, f"{args.check} at {th.label()}: {v}"
    if not args.input:
        raise InputError("maslov needs --input or --check")
    data = _load_json(args.input)
    try:
        space = SymplecticSpace(np.array(data["J"], dtype=float))
        paths = []
        for key in ("L", "M"):
            item = data[key]
            if isinstance(item, dict) and "basis" in item:
                paths.append(LagrangianPath.constant(_frame(space, item["basis"])))
            else:
                paths.append(LagrangianPath.from_samples([(s["t"], _frame(space, s["basis"])) for s in item]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed maslov input: {exc}") from exc
    val = maslov_index(paths[0], paths[1], cfg.tolerance)
    return {"value": val.value, "epsilon": val.epsilon}, f"Maslov index {val.value}"


def cmd_check_central(args, cfg: RunConfig) -> tuple[dict, str]:
    B = Monodromy.parse(args.B)
    phi, psi = RepPoint.parse(args.phi), RepPoint.parse(args.psi)
    rep = check_central_obstruction(B, phi, psi, args.window)
    out = rep.to_json()
    w = pair_vector(B, phi, psi)
    out["pair_vector"] = list(w)
    out["curve"] = find_curve(B, phi, psi).to_json()
    return out, (f"{rep.central_choices}/{rep.choices} choices central, "
                 f"{rep.both_odd_choices}/{rep.choices} both-odd")


def cmd_validate_cycle(args, cfg: RunConfig) -> tuple[dict, str]:
    checks = validate_cycle()
    out = {"checks": [c.to_json() for c in checks], "passed": all(c.passed for c in checks)}
    if not out["passed"]:
        raise MathFailure("cycle validation failed", out)
    return out, f"{len(checks)} cycle checks passed"


COMMANDS = {
    "reps": cmd_reps, "sf": cmd_sf, "sf-solid": cmd_sf_solid, "spectrum": cmd_spectrum,
    "maslov": cmd_maslov, "check-central": cmd_check_central, "validate-cycle": cmd_validate_cycle,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torusflow", description="Spectral flow on torus splittings.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--tol", type=float, default=1e-10,
                    help="endpoint tolerance for float Maslov input")
    ap.add_argument("--cutoff", type=int, default=4, help="Fourier mode cutoff")
    ap.add_argument("--output", type=Path, help="also write the JSON here")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reps", help="conjugacy classes of abelian representations")
    p.add_argument("--B", required=True, help="monodromy a,b,c,d")

    p = sub.add_parser("sf", help="spectral flow mod 4 between two representations")
    p.add_argument("--B", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--arc-policy", choices=["plus", "minus"], default="plus")
    p.add_argument("--rs-shift", type=int, default=0)
    p.add_argument("--search", type=int, default=0,
                   help="try conjugate representatives within this window")

    p = sub.add_parser("sf-solid", help="solid-torus spectral flow of a blow-up path")
    p.add_argument("--path", required=True, help="path JSON, inline or a file name")

    p = sub.add_parser("spectrum", help="exact spectrum of the torus operator")
    p.add_argument("--point", required=True, help="alpha,beta as p/q")
    p.add_argument("--cutoff", dest="sub_cutoff", type=int, default=None,
                   help="Fourier mode cutoff (overrides the global option)")

    p = sub.add_parser("maslov", help="Maslov index of a pair of Lagrangian paths")
    p.add_argument("--input")
    p.add_argument("--check", choices=["flow-flat-solid", "circle-mas"])
    p.add_argument("--theta", default="1")
    p.add_argument("--order", choices=["LK", "KL"], default="LK")

    p = sub.add_parser("check-central", help="are all conjugate choices central on the boundary")
    p.add_argument("--B", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--window", type=int, default=3)

    sub.add_parser("validate-cycle", help="check the cycle z")
    return ap


def _emit(payload, cfg: RunConfig) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if cfg.output:
        cfg.output.write_text(text + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cutoff = getattr(args, "sub_cutoff", None)
        cfg = RunConfig(args.command, args.tol, args.cutoff if cutoff is None else cutoff, args.output)
        payload, summary = COMMANDS[args.command](args, cfg)
    except MathFailure as exc:
        _emit(exc.payload, cfg)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (InputError, BundleError, BlowupError, SolidTorusError, SymplecticError,
            ValueError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(payload, cfg)
    print(summary, file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
