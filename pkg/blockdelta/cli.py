"""
Command line front end

    blockdelta dist   -w 11 -t 37
    blockdelta var    -w 011 --tmax 64 --format csv
    blockdelta gauss  -w 11 --family "(10)^N for N in 8..64"
    blockdelta verify -w 011 --tmax 4096
    blockdelta oracle -w 10 -t 5
    blockdelta scan   -w 11 --tmax 64 --field cusick --format csv
"""

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__, cache, cfengine, direct, gauss, moments, report
from .config import FORMATS, SCAN_FIELDS, RunConfig, cache_dir, configure_logging, parse_krange
from .errors import BlockDeltaError
from .words import Pattern, blocks01

logger = logging.getLogger(__name__)

EXACT = "exact"
ON_GRID = "verified on grid"
STRUCTURE_MAX_LENGTH = 6

CheckResult = Tuple[str, bool, str, bool]


def _meta(config: RunConfig) -> Optional[Dict[str, str]]:
    return None if config.no_meta else report.metadata(__version__)


def _status(message: str) -> None:
    print(message, file=sys.stderr)


def _written(config: RunConfig, count: int) -> None:
    if config.output is not None:
        _status(f"Wrote {count} rows to {config.output}")


def _ordered_map(func: Callable, jobs: Sequence, workers: int) -> List:
    """Map func over jobs, in order, in a process pool when workers > 1."""
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(func, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [func(job) for job in jobs]


def cmd_dist(config: RunConfig) -> int:
    """Write the exact distribution delta_t."""
    w = config.pattern
    t = config.shifts()[0]
    delta = cfengine.dist(w, t, config.epsilon, config.kmax)
    if config.fmt == "csv":
        rows = [{"k": k, "probability": p, "probability_float": float(p)} for k, p in delta.support.items()]
        count = report.write_rows(config.output, "csv", ["k", "probability", "probability_float"], rows)
    else:
        with report.open_output(config.output) as stream:
            report.write_json(stream, delta.to_dict(), _meta(config))
        count = len(delta.support)
    _written(config, count)
    return 0


VAR_FIELDS = ["t", "v_t", "q_t", "occ01", "lower_bound", "upper_bound"]


def cmd_var(config: RunConfig) -> int:
    """Write v_t, q_t and the variance bounds for every selected t."""
    w = config.pattern
    ts = config.shifts()
    rows = moments.variance_table(w, ts)
    summary: Dict[str, object] = {"w": str(w)}
    if len(ts) == 1 and config.fmt == "json":
        data = moments.var_vec(w, ts[0])
        summary.update({"V": list(data.V), "M": list(data.M), "u": list(data.u), "interval_width": data.interval_width})
    count = report.write_rows(config.output, config.fmt, VAR_FIELDS, rows, summary, _meta(config))
    _written(config, count)
    return 0


GAUSS_FIELDS = ["k", "delta_exact", "delta_float", "gaussian", "abs_error"]
SCALING_FIELDS = ["N", "t", "occ01", "v_t", "max_error", "bound", "scaled_error"]


def cmd_gauss(config: RunConfig) -> int:
    """
    Compare delta_t with the Gaussian main term.

    A single t writes the per-k table; a family writes one row per member
    with the scaled error max_error * N / (log N)^2.
    """
    w = config.pattern
    krange = parse_krange(config.krange) if config.krange else None
    if config.family is None:
        result = gauss.compare(w, config.shifts()[0], krange, config.epsilon)
        summary = result.summary(with_budget=config.budget)
        count = report.write_rows(config.output, config.fmt, GAUSS_FIELDS, result.csv_rows(), summary, _meta(config))
        _written(config, count)
        return 0

    rows = []
    for n, t in config.family_members():
        result = gauss.compare(w, t, krange, config.epsilon)
        blocks = result.N
        scaled = result.max_error * blocks / math.log(blocks) ** 2 if blocks > 1 else math.inf
        row = {
            "N": n,
            "t": t,
            "occ01": blocks,
            "v_t": result.v,
            "max_error": result.max_error,
            "bound": result.bound,
            "scaled_error": scaled,
        }
        if config.budget and result.budget is not None:
            row["budget"] = result.budget.to_dict()
        rows.append(row)
        logger.info("gauss N=%d: max_error=%.3g", n, result.max_error)
    fields = SCALING_FIELDS + (["budget"] if config.budget and config.fmt == "json" else [])
    count = report.write_rows(config.output, config.fmt, fields, rows, {"w": str(w), "family": config.family}, _meta(config))
    _written(config, count)
    return 0


def _pattern_checks(w: Pattern) -> List[CheckResult]:
    """Checks that depend on w only, or on t modulo 2^l."""
    ell = w.length
    results: List[CheckResult] = []
    upper = moments.q_upper_bound(w)
    for t in range(1 << ell):
        q, lower, case = moments.q_scalar(w, t), moments.q_lower_bound(w, t), moments.q_case(w, t)
        exact_case = case in ("i", "ii", "iii")
        results.append(("q_bounds", (q == lower if exact_case else q >= lower) and q < upper, EXACT, False))
        means = moments.mean_vec(w, t)
        results.append(("mean_recursion", means == moments.mean_vec_rec(w, t), EXACT, False))
        results.append(("mean_sum_zero", means.total() == 0, EXACT, False))
        results.append(("mean_sup_norm", means.sup_norm() <= 1 - Fraction(1, 1 << (ell - 1)), EXACT, False))
    second = moments.second_moments_at_one(w)
    results.append(("v1_linear_system", second == tuple(cfengine.gamma1(w).moments(2)), EXACT, False))
    results.append(("v1_rough_bound", gauss.check_v1_rough_bound(w)[0], EXACT, False))
    for t in (1, 2, 3):
        vector = cfengine.gamma_vec(w, t << (2 * ell - 2))
        results.append(("char_fun_eq", cfengine.all_entries_equal(vector), EXACT, False))
    if ell <= STRUCTURE_MAX_LENGTH:
        power = cfengine.matrix_power_at_one(w, ell - 1)
        results.append(
            ("matrix_power", all(entry == Fraction(1, 1 << (ell - 1)) for row in power for entry in row), EXACT, False)
        )
    return results


def _shift_checks(job: Tuple[Pattern, int, float, int, bool]) -> List[CheckResult]:
    """Checks at one shift t; the grid checks run only when requested."""
    w, t, theta0, grid_size, on_grid = job
    ell = w.length
    results: List[CheckResult] = []
    holds, _ = gauss.check_prop_A(w, t)
    results.append(("prop_A", holds, EXACT, False))
    v, following = moments.variance(w, t), moments.variance(w, t + 1)
    results.append(("v_step", abs(following - v) <= Fraction(16, 1 << ell), EXACT, False))
    data = moments.var_vec(w, t)
    results.append(("v_close", data.spread() <= 16, EXACT, False))
    results.append(("var_vec_average", data.v == v, EXACT, False))
    results.append(("symmetry", cfengine.symmetry_holds(w, t), EXACT, False))
    if str(w) in ("01", "10"):
        results.append(("v_blocks_quarter", 4 * v >= blocks01(t), EXACT, False))
        results.append(("v_doubling", moments.variance(w, 2 * t) == v, EXACT, False))
    if on_grid:
        stated_decay = gauss.Constants.for_pattern(w).L
        checks = [
            (gauss.check_prop_B(w, t, theta0, grid_size), False),
            (gauss.check_prop_C(w, t, grid_size), False),
            (gauss.check_lambda_norm(w, t, grid_size), False),
            (gauss.check_normal_approximation(w, t, theta0, grid_size), False),
        ]
        stated = gauss.check_prop_C(w, t, grid_size, decay=stated_decay)
        checks.append((gauss.GridCheck("prop_C_stated", w, t, stated.max_violation, grid_size, stated.skipped), True))
        for check, informational in checks:
            if not check.skipped:
                results.append((check.name, check.passed, ON_GRID, informational))
    return results


def _aggregate(results: Iterable[CheckResult]) -> List[Dict[str, object]]:
    table: Dict[str, Dict[str, object]] = {}
    for name, passed, method, informational in results:
        row = table.setdefault(
            name,
            {"check": name, "method": method, "count": 0, "passed": 0, "failed": 0, "informational": informational},
        )
        row["count"] += 1
        row["passed" if passed else "failed"] += 1
    return list(table.values())


VERIFY_FIELDS = ["check", "method", "count", "passed", "failed", "informational"]


def cmd_verify(config: RunConfig) -> int:
    """
    Run the exact and grid checks for t < tmax and report pass/fail counts.

    Grid checks run for t < grid_tmax. Informational rows never fail the run.
    """
    w = config.pattern
    ts = config.shifts()
    # Step 1: checks that only depend on the pattern
    results = _pattern_checks(w)
    # Step 2: per-shift checks, in t order
    jobs = [(w, t, config.theta0, config.grid_size, t < config.grid_tmax) for t in ts]
    for part in _ordered_map(_shift_checks, jobs, config.jobs):
        results.extend(part)
    rows = _aggregate(results)
    failures = sum(row["failed"] for row in rows if not row["informational"])
    summary = {"w": str(w), "shifts": len(ts), "all_passed": failures == 0}
    report.write_rows(config.output, config.fmt, VERIFY_FIELDS, rows, summary, _meta(config))
    for row in rows:
        if row["failed"] and not row["informational"]:
            _status(f"FAILED {row['check']}: {row['failed']} of {row['count']}")
    outcome = "All checks passed" if failures == 0 else f"{failures} check(s) failed"
    _status(f"{outcome} for w={w}, {len(ts)} shifts")
    return 0 if failures == 0 else 1


def cmd_oracle(config: RunConfig) -> int:
    """
    Enumerate d_t directly and compare with the characteristic function engine.

    Exits 1 when the two distributions differ on the exact range.
    """
    w = config.pattern
    t = config.shifts()[0]
    kmax = config.kmax if config.kmax or not w.is_constant else 10
    result = direct.empirical_dist(w, t, config.lam, kmax=kmax, strategy=config.strategy, workers=config.jobs)
    observed = result.to_int_dist()
    expected = cfengine.dist(w, t, config.epsilon, kmax)
    if w.is_constant:
        expected = expected.restricted(kmax)
        matches = observed.support == expected.support
    else:
        matches = observed.support == expected.support and observed.is_exact
    payload = result.to_dict()
    payload["support"] = observed.to_dict()["support"]
    payload["matches_cfengine"] = matches
    with report.open_output(config.output) as stream:
        report.write_json(stream, payload, _meta(config))
    if not result.exact:
        _status(f"lambda={result.lam} is below the exact exponent {direct.exact_lambda(w, t, kmax)}")
    if not matches:
        _status(f"Oracle and cfengine distributions differ for w={w}, t={t}")
        return 1
    return 0


def _scan_value(job: Tuple[Pattern, int, str]) -> Dict[str, object]:
    w, t, field = job
    if field == "variance":
        return {"t": t, "value": moments.variance(w, t)}
    if field == "q":
        return {"t": t, "value": moments.q_scalar(w, t)}
    lower, upper = gauss.cusick_density(w, t)
    return {"t": t, "value": lower, "upper": upper}


def cmd_scan(config: RunConfig) -> int:
    """Sweep cusick_density, the variance or q_t over the selected t."""
    w = config.pattern
    jobs = [(w, t, config.field) for t in config.shifts()]
    rows = _ordered_map(_scan_value, jobs, config.jobs)
    fields = ["t", "value"] + (["upper"] if config.fmt == "json" and config.field == "cusick" else [])
    count = report.write_rows(config.output, config.fmt, fields, rows, {"w": str(w), "field": config.field}, _meta(config))
    _written(config, count)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-w", "--pattern", dest="w", required=True, help="Binary pattern, length >= 2")
    parser.add_argument("-o", "--output", default=None, help="Output file (default: stdout)")
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    parser.add_argument("--no-meta", action="store_true", help="Omit the timestamp block from JSON output")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes")
    parser.add_argument("--allow-large", action="store_true", help="Accept patterns longer than the default cap")


def _add_shifts(parser: argparse.ArgumentParser, single: bool = False) -> None:
    group = parser.add_mutually_exclusive_group(required=single)
    group.add_argument("-t", type=int, default=None, help="Shift t")
    if not single:
        group.add_argument("--tmax", type=int, default=None, help="Sweep tmin <= t < tmax")
        group.add_argument("--family", default=None, help="Family such as '(10)^N for N in 4..64'")
        parser.add_argument("--tmin", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockdelta", description="Exact distributions of block-count differences")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    pd = sub.add_parser("dist", help="Exact distribution of d_t")
    _add_common(pd)
    _add_shifts(pd, single=True)
    pd.add_argument("--epsilon", default=None, help="Tail tolerance for constant patterns, e.g. 1e-12 or 1/1000")
    pd.add_argument("--kmax", type=int, default=0)
    pd.set_defaults(func=cmd_dist)

    pv = sub.add_parser("var", help="Exact variances v_t and increments q_t")
    _add_common(pv)
    _add_shifts(pv)
    pv.set_defaults(func=cmd_var)

    pg = sub.add_parser("gauss", help="Compare delta_t with the Gaussian main term")
    _add_common(pg)
    group = pg.add_mutually_exclusive_group(required=True)
    group.add_argument("-t", type=int, default=None)
    group.add_argument("--family", default=None)
    pg.add_argument("--krange", default=None, help="Inclusive range of k, e.g. -20..20")
    pg.add_argument("--epsilon", default=None)
    pg.add_argument("--budget", action="store_true", help="Add the itemised error budget")
    pg.set_defaults(func=cmd_gauss)

    pc = sub.add_parser("verify", help="Check the moment identities and analytic bounds")
    _add_common(pc)
    pc.add_argument("--tmin", type=int, default=0)
    pc.add_argument("--tmax", type=int, default=256)
    pc.add_argument("--grid-tmax", type=int, default=512, help="Run grid checks for t below this")
    pc.add_argument("--theta0", type=float, default=1.0)
    pc.add_argument("--grid-size", type=int, default=gauss.DEFAULT_GRID_SIZE)
    pc.set_defaults(func=cmd_verify)

    po = sub.add_parser("oracle", help="Direct enumeration cross-check")
    _add_common(po)
    _add_shifts(po, single=True)
    po.add_argument("--lambda", dest="lam", type=int, default=None, help="Enumeration exponent")
    po.add_argument("--kmax", type=int, default=0, help="Exact range for constant patterns (default 10)")
    po.add_argument("--strategy", choices=direct.STRATEGIES, default="auto")
    po.add_argument("--epsilon", default=None)
    po.set_defaults(func=cmd_oracle)

    ps = sub.add_parser("scan", help="Sweep a scalar over t")
    _add_common(ps)
    _add_shifts(ps)
    ps.add_argument("--field", choices=SCAN_FIELDS, default="cusick")
    ps.set_defaults(func=cmd_scan)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the ``blockdelta`` console script.

    Returns:
        int: 0 on success, 1 on failed checks, 2 on invalid input,
        3 when a resource cap is exceeded
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.verbose)
        config = RunConfig.from_args(args).validate()
        w = config.pattern
        if config.allow_large and w.length > cfengine.DEFAULT_LENGTH_CAP:
            cfengine.set_length_cap(w.length)
        directory = cache_dir()
        if cache.load_gamma_memo(w, directory):
            _status(f"Loaded cached tables for w={w} from {directory}")
        code = args.func(config)
        cache.save_gamma_memo(w, directory)
        return code
    except BlockDeltaError as exc:
        _status(f"Error: {exc}")
        return exc.exit_code
    except ValueError as exc:
        _status(f"Error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
