"""Command-line entry point: ``edgewit {analyze,witness,scan,family}``.

Exit codes: 0 success, 2 unreadable or invalid input, 3 failed
precondition (e.g. state not PPT), 4 no edge component to build a witness
from.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass

from . import serialize
from .decomposition import decompose_edge, is_edge
from .errors import EdgewitError, InvalidOperatorError, ParameterError, PreconditionError
from .family import default_grid, rho_b, scan_family
from .maps import witness_to_map
from .operators import DensityMatrix, PSD_TOL, RANK_TOL, ppt_check, rank, partial_transpose, substream
from .product_search import DEFAULT_RESTARTS, ZERO_TOL
from .witness import SAFETY, construct_edge_witness, optimize_witness

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_NO_EDGE = 0, 2, 3, 4

log = logging.getLogger("edgewit")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    rank_tol: float = RANK_TOL
    zero_tol: float = ZERO_TOL
    psd_floor: float = PSD_TOL
    safety: float = SAFETY
    output_path: str | None = None

    def __post_init__(self):
        for name in ("rank_tol", "zero_tol", "psd_floor"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if not 0 < self.safety <= 1:
            raise ParameterError("safety must lie in (0, 1]")
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


class NoEdgeComponent(EdgewitError):
    pass


def _emit(text: str, path: str | None):
    if path:
        serialize.atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _load_state(path: str) -> DensityMatrix:
    return serialize.load_operator(path, state=True)


def cmd_analyze(path: str, cfg: RunConfig) -> dict:
    rho = _load_state(path)
    ppt = ppt_check(rho, cfg.psd_floor)
    out = {"is_ppt": ppt.is_ppt, "min_pt_eigenvalue": ppt.min_pt_eigenvalue,
           "is_edge": None, "decomposition": None}
    if not ppt.is_ppt:
        return out
    out["is_edge"] = is_edge(rho, cfg.restarts, substream(cfg.seed, 0),
                             zero_tol=cfg.zero_tol, rank_tol=cfg.rank_tol)
    dec = decompose_edge(rho, cfg.restarts, substream(cfg.seed, 1),
                         zero_tol=cfg.zero_tol, rank_tol=cfg.rank_tol)
    out["decomposition"] = {
        "p": dec.p,
        "n_components": len(dec.separable_part),
        "n_steps": len(dec.steps),
        "edge_ranks": (None if dec.edge_part is None else
                       [rank(dec.edge_part, cfg.rank_tol),
                        rank(partial_transpose(dec.edge_part), cfg.rank_tol)]),
        "full": serialize.decomposition_to_json(dec),
    }
    return out


def cmd_witness(path: str, cfg: RunConfig, optimize: bool = False, to_map: bool = False) -> dict:
    rho = _load_state(path)
    if not ppt_check(rho, cfg.psd_floor).is_ppt:
        raise PreconditionError("input state is not PPT; a decomposable witness suffices")
    dec = decompose_edge(rho, cfg.restarts, substream(cfg.seed, 1),
                         zero_tol=cfg.zero_tol, rank_tol=cfg.rank_tol)
    if dec.edge_part is None:
        raise NoEdgeComponent("no edge component")
    delta = dec.edge_part
    wc = construct_edge_witness(delta, safety=cfg.safety, restarts=cfg.restarts,
                                seed=substream(cfg.seed, 2), check_edge=False,
                                rank_tol=cfg.rank_tol)
    report = optimize_witness(wc.W, max_iters=None if optimize else 0, restarts=cfg.restarts,
                              seed=substream(cfg.seed, 3), zero_tol=cfg.zero_tol,
                              certificate_candidates=[rho, delta])
    out = {
        "report": serialize.report_to_json(report),
        "construction": {"epsilon": wc.epsilon, "epsilon_used": wc.epsilon_used, "c": wc.c},
        "edge_weight": dec.p,
    }
    if to_map:
        out["choi_map"] = serialize.choi_map_to_json(witness_to_map(report.witness))
    return out


def cmd_scan(b_source: float, grid_steps: int, optimize: bool, cfg: RunConfig):
    row = scan_family(b_source, default_grid(grid_steps), optimize, cfg.restarts, cfg.seed,
                      cfg.safety)
    return serialize.scan_to_csv(row), serialize.scan_header(row, cfg.seed)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--rank-tol", type=float, default=RANK_TOL)
    p.add_argument("--zero-tol", type=float, default=ZERO_TOL)
    p.add_argument("--safety", type=float, default=SAFETY)
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgewit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="PPT test, edge test and edge decomposition of a state")
    p.add_argument("input")
    _common(p)

    p = sub.add_parser("witness", help="build (and optionally optimize) a witness for a state")
    p.add_argument("input")
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--to-map", action="store_true")
    _common(p)

    p = sub.add_parser("scan", help="detection scan over the 2x4 rho_b family")
    p.add_argument("--b-source", type=float, required=True)
    p.add_argument("--grid-steps", type=int, default=39)
    p.add_argument("--optimize", action="store_true")
    _common(p)

    p = sub.add_parser("family", help="write rho_b as an operator JSON file")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "family":
            _emit(serialize.dumps(serialize.operator_to_json(rho_b(args.b))), args.out)
            return EXIT_OK
        cfg = RunConfig(seed=args.seed, restarts=args.restarts, rank_tol=args.rank_tol,
                        zero_tol=args.zero_tol, safety=args.safety, output_path=args.out)
    except ParameterError as exc:
        print(f"edgewit: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.command == "analyze":
            _emit(serialize.dumps(cmd_analyze(args.input, cfg)), cfg.output_path)
        elif args.command == "witness":
            out = cmd_witness(args.input, cfg, args.optimize, args.to_map)
            _emit(serialize.dumps(out), cfg.output_path)
        elif args.command == "scan":
            csv_text, header = cmd_scan(args.b_source, args.grid_steps, args.optimize, cfg)
            out = cfg.output_path or "scan.csv"
            serialize.atomic_write(out, csv_text)
            serialize.atomic_write(_header_path(out), serialize.dumps(header))
    except InvalidOperatorError as exc:
        print(f"edgewit: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoEdgeComponent as exc:
        print(f"edgewit: {exc}", file=sys.stderr)
        return EXIT_NO_EDGE
    except (PreconditionError, ParameterError) as exc:
        print(f"edgewit: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


def _header_path(csv_path: str) -> str:
    return csv_path[:-4] + ".json" if csv_path.endswith(".csv") else csv_path + ".json"


if __name__ == "__main__":
    sys.exit(main())
