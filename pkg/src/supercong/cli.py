"""Command-line front end: congruence sweeps, character-sum identity suites,
analytic identities, and catalog inspection.

Reports are emitted as JSON lines, CSV, or a plain table; when an output
path is given, a verdict-grid figure (PNG) is rendered next to the report.
Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from mpmath import mp, mpf, workprec

from . import charsum
from .analytic import MIN_PRECISION, check_special_value, check_table1
from .arith import legendre, primes_up_to
from .catalog import Catalog, CatalogError, expand_ids, load_catalog
from .curves import BadReduction, InvalidT, build_curve, fp2_element, fp2_nonresidue
from .hypergeom import TWIST_CONSTANT
from .verify import Report, Verdict, run_sweep

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

PMAX_CAP = 10**4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supercong",
        description="Verify truncated hypergeometric supercongruences and their "
        "character-sum and analytic companions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "table"), default="table")
        p.add_argument("--out", help="report file; a PNG verdict grid is written alongside")
        p.add_argument("--catalog", help="catalog file override (wins over SUPERCONG_CATALOG)")

    v = sub.add_parser("verify", help="sweep catalog congruences over primes")
    v.add_argument("--examples", default="A-Q", help="comma list and/or ranges, e.g. A-K or L,M")
    v.add_argument("--pmax", type=int, default=150)
    v.add_argument("--mod", default="2", help="modulus powers: 2, 3, or 2,3")
    v.add_argument("--parallel", type=int, default=0, help="worker processes (content-invariant)")
    v.add_argument(
        "--expect-fail",
        action="store_true",
        help="acknowledge negative claims (failures are required for them either way)",
    )
    common(v)

    c = sub.add_parser("charsum", help="finite character-sum identity suite")
    c.add_argument("--pmax", type=int, default=41)
    c.add_argument("--with-fp2", action="store_true", help="include F_25 and F_49 contexts")
    c.add_argument("--precision", type=int, default=charsum.DEFAULT_PRECISION)
    common(c)

    a = sub.add_parser("analytic", help="1/pi series and special-value identities")
    a.add_argument("--precision", type=int, default=256)
    a.add_argument("--only", help="restrict to one identity id (an example id or 5.1..5.5)")
    common(a)

    k = sub.add_parser("catalog", help="inspect the example catalog")
    k.add_argument("action", choices=("list", "validate", "show"))
    k.add_argument("id", nargs="?")
    k.add_argument("--catalog", help="catalog file override")
    return parser


# --- suites ----------------------------------------------------------------


def _curve_ok(d: int, t, p: int) -> bool:
    try:
        build_curve(d, t, p)
        return True
    except (InvalidT, BadReduction):
        return False


def run_charsum_suite(pmax: int, with_fp2: bool, precision: int) -> Report:
    """Trace equality, t=1 evaluation, Clausen branches, and twist identity."""
    report = Report("-", ["charsum"], pmax, [1])
    charsum.reset_escalations()
    primes = [p for p in primes_up_to(pmax) if p >= 5]

    def add(name, p, case, ok, note=None):
        report.verdicts.append(
            Verdict(name, p, 1, "0", case, None, None, p, ok, None, "positive", note)
        )

    for d in (2, 3, 4, 6):
        for p in primes:
            ts = [t for t in range(2, p) if _curve_ok(d, t, p)]
            add(f"trace:d{d}", p, f"t-count={len(ts)}",
                all(charsum.hp_trace_equality(d, t, p) for t in ts))
            add(f"twist:d{d}", p, f"t-count={len(ts)}",
                all(charsum.twist_identity(d, t, p) for t in ts if _curve_ok(d, (1 - t) % p, p)))
            add(f"h-at-1:d{d}", p, "t=1", charsum.h_at_one(p, d) == legendre(TWIST_CONSTANT[d], p))
            cts = list(range(1, p))
            add(f"clausen:d{d}", p, f"t-count={len(cts)}",
                all(charsum.clausen_check(p, d, t) for t in cts))
    for p in primes:
        ts = [t for t in range(2, p)]
        add("clausen-quartic", p, f"t-count={len(ts)}",
            all(charsum.clausen_quartic_check(p, t) for t in ts))
    if with_fp2:
        for p in (5, 7):
            nr = fp2_nonresidue(p)
            pairs = [
                (a, b)
                for a in range(p)
                for b in range(p)
                if (a, b) not in ((0, 0), (1, 0))
            ]
            good = [t for t in pairs if _all_curves_ok(t, p, nr)]
            for d in (2, 3, 4, 6):
                ok_t = [t for t in pairs if _curve_ok(d, fp2_element(*t, p, nr), p)]
                add(f"trace-fp2:d{d}", p * p, f"t-count={len(ok_t)}",
                    all(charsum.hp_trace_equality(d, t, p, f=2, nonres=nr) for t in ok_t))
                tw = [t for t in ok_t if _curve_ok(d, fp2_element((1 - t[0]) % p, -t[1] % p, p, nr), p)]
                add(f"twist-fp2:d{d}", p * p, f"t-count={len(tw)}",
                    all(charsum.twist_identity(d, t, p, f=2, nonres=nr) for t in tw))
            del good
    add("rounding", 0, f"escalations={charsum.escalation_count()}",
        charsum.escalation_count() == 0)
    return report


def _all_curves_ok(t, p, nr):
    return all(_curve_ok(d, fp2_element(*t, p, nr), p) for d in (2, 3, 4, 6))


def run_analytic_suite(catalog: Catalog, precision: int, only=None) -> Report:
    report = Report(catalog.version, ["analytic"], 0, [0])
    with workprec(precision):
        threshold = mpf(10) ** -40 if precision >= 256 else mpf(2) ** (-(precision - 20))
        for ex in catalog.examples:
            if only and ex.id != only:
                continue
            residual = check_table1(ex, precision)
            if residual is None:
                continue
            report.verdicts.append(
                Verdict(f"series:{ex.id}", 0, 0, "0", "residual", None, None, 0,
                        bool(residual < threshold), None, "positive", mp.nstr(residual, 6))
            )
        for sv in catalog.special_values:
            if only and sv.id != only:
                continue
            residual = check_special_value(sv, catalog.omega_fields, precision)
            report.verdicts.append(
                Verdict(f"special:{sv.id}", 0, 0, "0", "residual", None, None, 0,
                        bool(residual < threshold), None, "positive", mp.nstr(residual, 6))
            )
    if not report.verdicts:
        raise CatalogError(f"no analytic identity matches {only!r}")
    return report


# --- output ----------------------------------------------------------------


def render_figure(report: Report, path: str) -> None:
    """Verdict grid: one row per check id, one column per prime."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap

    ids = []
    for v in report.verdicts:
        if v.example_id not in ids:
            ids.append(v.example_id)
    ps = sorted({v.p for v in report.verdicts})
    grid = [[0.0] * len(ps) for _ in ids]  # 0 none, 1 skip, 2 fail, 3 pass
    for v in report.verdicts:
        i, j = ids.index(v.example_id), ps.index(v.p)
        mark = 1.0 if v.skipped else (3.0 if v.passed else 2.0)
        grid[i][j] = max(grid[i][j], mark) if grid[i][j] != 2.0 else 2.0
    fig, ax = plt.subplots(
        figsize=(max(4.0, 0.22 * len(ps) + 1.5), max(2.5, 0.3 * len(ids) + 1.0))
    )
    cmap = ListedColormap(["#ffffff", "#bbbbbb", "#c0392b", "#27ae60"])
    ax.imshow(grid, aspect="auto", cmap=cmap, vmin=0, vmax=3, interpolation="nearest")
    ax.set_yticks(range(len(ids)), ids, fontsize=7)
    step = max(1, len(ps) // 24)
    ax.set_xticks(range(0, len(ps), step), [str(p) for p in ps[::step]], fontsize=6, rotation=90)
    ax.set_xlabel("p")
    ax.set_title("pass / fail / skip grid")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_report(report: Report, fmt: str, out) -> None:
    text = {"json": report.to_jsonl, "csv": report.to_csv, "table": report.to_table}[fmt]()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        render_figure(report, os.path.splitext(out)[0] + ".png")
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------


def cmd_verify(args, catalog: Catalog) -> int:
    if not 0 < args.pmax <= PMAX_CAP:
        print(f"error: --pmax must be in 1..{PMAX_CAP}", file=sys.stderr)
        return EXIT_USAGE
    try:
        powers = sorted({int(x) for x in args.mod.split(",")})
    except ValueError:
        powers = []
    if not powers or not set(powers) <= {2, 3}:
        print("error: --mod must be 2, 3, or 2,3", file=sys.stderr)
        return EXIT_USAGE
    try:
        ids = expand_ids(args.examples, catalog)
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_sweep(ids, args.pmax, powers, catalog, parallel=args.parallel)
    emit_report(report, args.format, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_charsum(args) -> int:
    if args.precision < MIN_PRECISION:
        print(f"error: --precision must be >= {MIN_PRECISION}", file=sys.stderr)
        return EXIT_USAGE
    if not 0 < args.pmax <= 200:
        print("error: --pmax must be in 1..200 for character sums", file=sys.stderr)
        return EXIT_USAGE
    report = run_charsum_suite(args.pmax, args.with_fp2, args.precision)
    emit_report(report, args.format, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_analytic(args, catalog: Catalog) -> int:
    if args.precision < MIN_PRECISION:
        print(f"error: --precision must be >= {MIN_PRECISION}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_analytic_suite(catalog, args.precision, args.only)
    except CatalogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit_report(report, args.format, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_catalog(args, catalog: Catalog) -> int:
    if args.action == "validate":
        catalog.validate()
        print(f"catalog version {catalog.version}: {len(catalog.examples)} records ok")
        return EXIT_OK
    if args.action == "list":
        print(f"# catalog version {catalog.version}")
        if catalog.comment:
            print(f"# {catalog.comment}")
        for ex in catalog.examples:
            shape = ",".join(str(b) for b in ex.b)
            print(
                f"{ex.id}  d={ex.d}  b=({shape})  case={ex.congruence_case}"
                f"  claims={','.join(sorted(ex.modulus_claims))}"
            )
        return EXIT_OK
    # show
    if not args.id:
        print("error: catalog show requires an id", file=sys.stderr)
        return EXIT_USAGE
    try:
        ex = catalog.get(args.id)
    except CatalogError:
        matches = [e for e in catalog.examples if e.ref == args.id]
        if not matches:
            print(f"error: no record with id or reference {args.id!r}", file=sys.stderr)
            return EXIT_USAGE
        ex = matches[0]
    for key in (
        "id", "ref", "d", "b", "alpha", "lam", "mu_rule", "N", "congruence_case",
        "ordinary_symbol", "split_symbol", "rhs_symbol", "classes", "pmin",
        "excluded", "modulus_claims", "K_CM", "lmfdb", "delta",
    ):
        value = getattr(ex, key)
        if isinstance(value, frozenset):
            value = sorted(value)
        if isinstance(value, tuple) and value and isinstance(value[0], Fraction):
            value = tuple(str(x) for x in value)
        print(f"{key}: {value}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        if args.command in ("verify", "analytic", "catalog"):
            try:
                catalog = load_catalog(getattr(args, "catalog", None))
            except (OSError, CatalogError, ValueError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
        if args.command == "verify":
            return cmd_verify(args, catalog)
        if args.command == "charsum":
            return cmd_charsum(args)
        if args.command == "analytic":
            return cmd_analytic(args, catalog)
        return cmd_catalog(args, catalog)
    except (AssertionError, ArithmeticError, RuntimeError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
