"""Command-line front end.

Exit codes: 0 success (all certificates hold), 1 a certificate or verdict
failed, 2 usage or parse error, 3 computation error.  Errors are also
written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bernoulli as bc
from . import limits as lim
from . import montecarlo as mc
from .distributions import DiscretePMF, cumulants, pmf_from_polynomial, pmf_to_csv
from .errors import DegenerateVariance, FamilyParseError, PolyzeroError
from .families import (
    HURWITZ,
    NEGATIVE_REAL,
    FamilyDescriptor,
    factor_spec,
    family_pmf,
    parse_family,
    parse_template,
    polynomial,
)
from .roots import (
    cobin_roots,
    geometry_predicates,
    matched_numeric_roots,
    numeric_roots,
    cluster_roots,
    roots_to_csv,
    zero_free_sector,
)

DEFAULT_PRECISION = 128
ROOT_DEGREE_LIMIT = 400
DOUBLE_ROUTE_DEGREE_LIMIT = 3000


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None = None
    N_grid: list[int] = field(default_factory=list)
    precision: int = DEFAULT_PRECISION
    seed: int = 0
    out: Path | None = None
    format: str = "json"

    def __post_init__(self):
        if self.precision < 53:
            raise UsageError("precision must be >= 53 bits")
        if any(b <= a for a, b in zip(self.N_grid, self.N_grid[1:])):
            raise UsageError("N grid must be strictly increasing")


def parse_grid(text: str) -> list[int]:
    """``5``, ``2..40``, ``10..200:10`` or a comma list of those."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                rng, _, step = part.partition(":")
                lo, hi = (int(x) for x in rng.split(".."))
                out.extend(range(lo, hi + 1, int(step) if step else 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if not out:
        raise UsageError("empty grid")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError(f"grid {text!r} is not strictly increasing")
    return out


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _emit(payload: dict, out: Path | None, name: str) -> None:
    payload = {**payload, "timestamp": _timestamp()}
    text = json.dumps(payload, indent=2, default=lim.serialize)
    if out is None:
        print(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _family_arg(args) -> str:
    fam = args.family_pos or args.family
    if not fam:
        raise UsageError("a family is required")
    return fam


def _q(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------- commands


def cmd_pmf(args, cfg: RunConfig) -> int:
    fam = parse_family(_family_arg(args), args.ell_eq_N)
    pmf = family_pmf(fam, args.backend)
    if isinstance(pmf, DiscretePMF):
        summary = {"mean": _q(pmf.mean()), "variance": _q(pmf.variance())}
    else:
        summary = {"mean": repr(pmf.mean()), "variance": repr(pmf.variance())}
    summary.update(family=fam.canonical(), support=[0, pmf.n], backend="exact" if isinstance(pmf, DiscretePMF) else "float")
    if cfg.format == "csv" or cfg.out is not None:
        _write(cfg.out, "pmf.csv", pmf_to_csv(pmf))
    if cfg.format == "json" or cfg.out is not None:
        _emit(summary, cfg.out, "summary.json")
    return 0


def cmd_cumulants(args, cfg: RunConfig) -> int:
    fam = parse_family(_family_arg(args), args.ell_eq_N)
    orders = parse_grid(args.orders) if args.orders else list(range(1, 9))
    M = max(orders)
    if fam.is_product_form:
        spec = factor_spec(fam)
        kappa = {m: bc.closed_form_cumulant(spec, m) for m in range(1, M + 1)}
        route = "closed-form"
    else:
        seq = cumulants(pmf_from_polynomial(polynomial(fam)), M)
        kappa = {m: seq[m] for m in range(1, M + 1)}
        route = "moments"
    s2 = kappa.get(2) if M >= 2 else None
    rows = []
    for m in orders:
        row = {"order": m, "kappa": _q(kappa[m])}
        if s2 and m % 2 == 0 and m >= 2:
            row["kappa_star"] = _q(kappa[m] / s2 ** (m // 2))
        rows.append(row)
    if cfg.format == "csv":
        lines = ["order,kappa,kappa_star"]
        lines += [f"{r['order']},{r['kappa']},{r.get('kappa_star', '')}" for r in rows]
        _write(cfg.out, "cumulants.csv", "\n".join(lines) + "\n")
    else:
        _emit({"family": fam.canonical(), "route": route, "cumulants": rows}, cfg.out, "cumulants.json")
    return 0


def _verify_product(fam: FamilyDescriptor, m_values, precision: int, corrected: bool = False) -> list[dict]:
    spec = factor_spec(fam)
    certs: list[dict] = []
    if spec.is_degenerate():
        return [{"check": "degenerate", "family": fam.canonical(), "holds": True, "note": "sigma^2 = 0, vacuous"}]
    for m in m_values:
        c = bc.verify_cumulant_bound(spec, m, precision, corrected)
        certs.append({"check": "cumulant-bound", "family": fam.canonical(), **c.to_dict()})
    sector = zero_free_sector(spec, precision)
    certs.append({"check": "zero-free-sector", "family": fam.canonical(), "holds": sector.zero_free})
    lemma = all(bc.lemma_inequality(a, b, m) for a, b in spec.pairs for m in m_values)
    certs.append({"check": "lemma", "family": fam.canonical(), "holds": lemma})
    if spec.degree <= DOUBLE_ROUTE_DEGREE_LIMIT:
        top = 2 * max(m_values)
        seq = cumulants(pmf_from_polynomial(polynomial(fam)), top)
        same = all(seq[k] == bc.closed_form_cumulant(spec, k) for k in range(1, top + 1))
        certs.append({"check": "cumulant-double-route", "family": fam.canonical(), "orders": top, "holds": same})
    return certs


def _verify_roots(fam: FamilyDescriptor, precision: int) -> list[dict]:
    p = polynomial(fam)
    if p.degree > ROOT_DEGREE_LIMIT or p.degree < 1:
        return []
    g = geometry_predicates(numeric_roots(p, precision), 1e-6, poly=p)
    if fam.kind in NEGATIVE_REAL:
        holds = g.real_rooted_negative
        what = "real-rooted-negative"
    else:
        holds = g.hurwitz
        what = "hurwitz"
    return [{"check": what, "family": fam.canonical(), "holds": holds, **g.as_dict()}]


def cmd_verify(args, cfg: RunConfig) -> int:
    make = parse_template(_family_arg(args), args.ell_eq_N)
    m_values = parse_grid(args.orders) if args.orders else list(range(2, 9))
    if min(m_values) < 2:
        raise UsageError("--orders counts m in kappa_{2m}; it must be >= 2")
    grid = cfg.N_grid or [None]
    certs: list[dict] = []
    for N in grid:
        fam = make(N) if N is not None else parse_family(_family_arg(args), args.ell_eq_N)
        if fam.is_product_form:
            certs.extend(_verify_product(fam, m_values, cfg.precision, args.corrected_delta))
        elif fam.kind in HURWITZ or fam.kind in NEGATIVE_REAL:
            certs.extend(_verify_roots(fam, cfg.precision))
    failing = next((c for c in certs if not c["holds"]), None)
    payload = {"family": _family_arg(args), "N_grid": cfg.N_grid, "certificates": len(certs), "all_hold": failing is None}
    if failing is not None:
        payload["first_failure"] = failing
    _emit(payload, cfg.out, "verify.json")
    return 0 if failing is None else 1


def cmd_roots(args, cfg: RunConfig) -> int:
    fam = parse_family(_family_arg(args), args.ell_eq_N)
    p = polynomial(fam)
    rows = []
    if fam.is_product_form:
        exact, num, worst = matched_numeric_roots(factor_spec(fam), p, precision=cfg.precision)
        rows = [(z, m, fam.canonical(), fam.N) for z, m in exact.exact_points()]
        geo = geometry_predicates(exact, 1e-8).as_dict()
        geo["max_match_distance"] = worst
    else:
        num = numeric_roots(p, cfg.precision)
        rows = [(z, m, fam.canonical(), fam.N) for z, m in cluster_roots(num)]
        geo = geometry_predicates(num, 1e-6, poly=p).as_dict()
        if fam.kind == "cobin":
            cf = cobin_roots(fam.N, fam.p, cfg.precision)
            geo["closed_form_real_part"] = lim.serialize(cf[0].real) if cf else None
    _write(cfg.out, "roots.csv", roots_to_csv(rows))
    if cfg.out is not None or cfg.format == "json":
        _emit({"family": fam.canonical(), "degree": p.degree, "geometry": geo}, cfg.out, "geometry.json")
    return 0


def cmd_limits(args, cfg: RunConfig) -> int:
    make = parse_template(_family_arg(args), args.ell_eq_N)
    grid = cfg.N_grid
    if not grid:
        try:
            grid = [parse_family(_family_arg(args), args.ell_eq_N).N]
        except FamilyParseError:
            raise UsageError("--N is required unless the family fixes N") from None
    check = args.check
    if check == "k4d2":
        rep = lim.mod_gaussian_trajectory(make, grid, v=args.v, precision=cfg.precision, jobs=args.jobs)
        if cfg.out is not None:
            _write(cfg.out, "k4d2_trajectory.csv", lim.k4d2_trajectory_csv(rep))
    elif check == "berry-esseen":
        rep = lim.berry_esseen_sweep(make, grid, backend=args.backend, precision=cfg.precision, jobs=args.jobs)
    elif check == "moderate-deviation":
        rep = lim.moderate_deviation_curve(make, grid, x=args.x, backend=args.backend)
    elif check == "concentration":
        reps = [lim.concentration_envelope(make(N), backend=args.backend, precision=cfg.precision) for N in grid]
        rep = lim.LimitReport(
            family=reps[-1].family,
            check="concentration",
            N_grid=grid,
            values=[r.values[0] for r in reps],
            verdict=all(r.verdict for r in reps),
            metadata=reps[-1].metadata,
        )
    elif check == "fourth-moment":
        rep = lim.fourth_moment_diagnostic(make, grid)
    elif check == "cdf":
        fam = make(grid[-1])
        pmf = family_pmf(fam, args.backend)
        dk = lim.kolmogorov_distance(pmf, cfg.precision)
        _write(cfg.out, "cdf_vs_normal.csv", lim.cdf_vs_normal_csv(pmf))
        rep = lim.LimitReport(fam.canonical(), "cdf", [fam.N], [dk], metadata={"precision_bits": cfg.precision})
    else:
        raise UsageError(f"unknown check {check!r}")
    if cfg.format == "csv" and check == "k4d2" and cfg.out is None:
        sys.stdout.write(lim.k4d2_trajectory_csv(rep))
    elif not (check == "cdf" and cfg.out is None):
        _emit(rep.to_dict(), cfg.out, f"{check}.json")
    return 1 if rep.verdict is False else 0


def cmd_simulate(args, cfg: RunConfig) -> int:
    fam = parse_family(_family_arg(args), args.ell_eq_N)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rec = mc.empirical_vs_exact(fam, args.samples, cfg.seed, args.jobs, validate=True)
    probs = mc._exact_probs(fam)
    _write(cfg.out, "histogram.csv", mc.histogram_to_csv(rec.histogram, probs))
    if cfg.out is not None or cfg.format == "json":
        _emit({"family": fam.canonical(), **rec.to_dict()}, cfg.out, "simulate.json")
    return 0


COMMANDS = {
    "pmf": cmd_pmf,
    "cumulants": cmd_cumulants,
    "verify": cmd_verify,
    "roots": cmd_roots,
    "limits": cmd_limits,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyzero", description="Cumulant bounds and limit checks for combinatorial generating polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("family_pos", nargs="?", metavar="FAMILY", help="family string, e.g. coxeter-inv:A:10")
        p.add_argument("--family", help="family string or template, e.g. coxeter-inv:A or cobin:N:1/2")
        p.add_argument("--N", dest="N", help="N grid: 5, 2..40, 10..200:10 or a comma list")
        p.add_argument("--orders", help="orders; for verify the m in kappa_{2m}")
        p.add_argument("--precision", type=int, help="working precision in bits (default 128 or $POLYZERO_PRECISION)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", type=Path, help="output directory; files go to stdout without it")
        p.add_argument("--format", choices=("json", "csv"), default="json" if name != "pmf" else "csv")
        p.add_argument("--check", choices=("k4d2", "berry-esseen", "moderate-deviation", "concentration", "fourth-moment", "cdf"), default="k4d2")
        p.add_argument("--samples", type=int, default=100000)
        p.add_argument("--backend", choices=("exact", "float", "auto"), default="auto")
        p.add_argument("--ell-eq-N", dest="ell_eq_N", action="store_true", help="tie gaussian ell to N")
        p.add_argument("--x", type=float, default=1.0, help="moderate-deviation point")
        p.add_argument(
            "--corrected-delta",
            dest="corrected_delta",
            action="store_true",
            help="verify: use Delta = sqrt(2) pi sigma / M, valid at every order",
        )
        p.add_argument("--v", type=int, default=4, choices=(3, 4), help="mod-Gaussian order")
    return parser


def _error(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def _precision(args) -> int:
    if args.precision is not None:
        return args.precision
    env = os.environ.get("POLYZERO_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"POLYZERO_PRECISION={env!r} is not an integer") from None
    return DEFAULT_PRECISION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            family=args.family_pos or args.family,
            N_grid=parse_grid(args.N) if args.N else [],
            precision=_precision(args),
            seed=args.seed,
            out=args.out,
            format=args.format,
        )
        return COMMANDS[args.command](args, cfg)
    except (UsageError, FamilyParseError) as e:
        return _error("usage", e, 2)
    except (PolyzeroError, DegenerateVariance, ValueError, ArithmeticError) as e:
        return _error("computation", e, 3)


if __name__ == "__main__":
    sys.exit(main())
