"""Congruence checking engines and report generation.

Each catalog example is swept over primes; a Verdict records one (example,
prime, modulus power, embedding branch) check with both sides of the
congruence.  Skips are first-class verdicts with reasons so coverage is
auditable.  All p-adic work runs at precision p^3 internally and is reduced
to the claimed modulus.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .arith import (
    PrimeModulus,
    RamifiedOrNonUnit,
    Residue,
    embed_surd,
    frac_mod,
    hensel_sqrt,
    inv_mod,
    legendre,
    primes_up_to,
    sqrt_mod_p,
)
from .catalog import Catalog, ExampleRecord, Weight3Case
from .curves import (
    BadReduction,
    InvalidT,
    build_curve,
    fp2_element,
    fp2_nonresidue,
    frobenius_over_Fp2,
    trace_of_frobenius,
    unit_root,
)
from .hypergeom import TWIST_CONSTANT, b_params, trunc_F, trunc_product_F

WORK_PRECISION = 3


class AmbiguousRounding(RuntimeError):
    """No unique integer representative in the Weil interval."""


class BranchAsymmetry(AssertionError):
    """Conjugate embedding branches disagree on pass status."""


@dataclass(frozen=True)
class Verdict:
    example_id: str
    p: int
    m: int
    branch: str  # "+", "-" for surd embeddings, "0" for rational data
    case: str
    lhs: Optional[int]
    rhs: Optional[int]
    modulus: int
    passed: Optional[bool]  # None for skips
    skip_reason: Optional[str]
    claim: str  # "positive" or "negative"
    note: Optional[str] = None  # free-form detail (e.g. analytic residuals)

    @property
    def skipped(self) -> bool:
        return self.passed is None

    def to_dict(self) -> dict:
        return {
            "id": self.example_id,
            "p": self.p,
            "m": self.m,
            "branch": self.branch,
            "case": self.case,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "modulus": self.modulus,
            "pass": self.passed,
            "skip_reason": self.skip_reason,
            "claim": self.claim,
            "note": self.note,
        }


@dataclass
class Report:
    catalog_version: str
    ids: list[str]
    pmax: int
    powers: list[int]
    verdicts: list[Verdict] = field(default_factory=list)

    def summary(self) -> dict:
        passed = sum(1 for v in self.verdicts if v.passed is True)
        failed = sum(1 for v in self.verdicts if v.passed is False)
        skipped = sum(1 for v in self.verdicts if v.skipped)
        negative: dict[str, dict] = {}
        for v in self.verdicts:
            if v.claim == "negative" and not v.skipped:
                slot = negative.setdefault(v.example_id, {"checked": 0, "failures": 0})
                slot["checked"] += 1
                slot["failures"] += 0 if v.passed else 1
        for slot in negative.values():
            slot["satisfied"] = slot["failures"] >= 1
        positive_ok = all(v.passed for v in self.verdicts if v.claim == "positive" and not v.skipped)
        negative_ok = all(slot["satisfied"] for slot in negative.values())
        return {
            "type": "summary",
            "catalog_version": self.catalog_version,
            "ids": self.ids,
            "pmax": self.pmax,
            "powers": self.powers,
            "total": len(self.verdicts),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
            "negative_claims": negative,
            "ok": positive_ok and negative_ok,
        }

    @property
    def ok(self) -> bool:
        return self.summary()["ok"]

    def to_jsonl(self) -> str:
        lines = [json.dumps(v.to_dict(), separators=(",", ":")) for v in self.verdicts]
        lines.append(json.dumps(self.summary(), separators=(",", ":"), sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "p", "branch", "case", "lhs", "rhs", "modulus", "pass", "skip_reason"])
        for v in self.verdicts:
            w.writerow(
                [
                    v.example_id,
                    v.p,
                    v.branch,
                    v.case,
                    "" if v.lhs is None else v.lhs,
                    "" if v.rhs is None else v.rhs,
                    v.modulus,
                    "" if v.passed is None else str(v.passed).lower(),
                    v.skip_reason or "",
                ]
            )
        return buf.getvalue()

    def to_table(self) -> str:
        def clip(x):
            s = "" if x is None else str(x)
            return s if len(s) <= 12 else s[:12] + ".."

        rows = [["id", "p", "m", "br", "case", "lhs", "rhs", "pass", "skip"]]
        for v in self.verdicts:
            rows.append(
                [
                    v.example_id,
                    str(v.p),
                    str(v.m),
                    v.branch,
                    v.case,
                    clip(v.lhs),
                    clip(v.rhs),
                    "" if v.passed is None else ("ok" if v.passed else "FAIL"),
                    v.skip_reason or "",
                ]
            )
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        out = []
        for r in rows:
            out.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        s = self.summary()
        out.append(
            f"-- total {s['total']}  passed {s['passed']}  failed {s['failed']}"
            f"  skipped {s['skipped']}  ok {s['ok']}"
        )
        return "\n".join(out) + "\n"


# --- admissibility ---------------------------------------------------------


def claim_for(ex: ExampleRecord, m: int) -> Optional[str]:
    """'positive' / 'negative' claim type of the example at modulus p^m, if any."""
    if m == 2:
        return "positive" if "p2" in ex.modulus_claims else None
    if m == 3:
        if "p3" in ex.modulus_claims or "p3_ordinary" in ex.modulus_claims:
            return "positive"
        if "p3_negative" in ex.modulus_claims:
            return "negative"
    return None


def _inadmissible_reason(ex: ExampleRecord, p: int) -> Optional[str]:
    if p in ex.excluded:
        return "excluded-prime"
    if p < ex.pmin:
        return "below-pmin"
    if ex.classes is not None:
        mod, residues = ex.classes
        if p % mod not in residues:
            return "inadmissible-class"
    if p < 5:
        return "below-5"
    return None


def admissible_primes(ex: ExampleRecord, pmax: int) -> list[int]:
    """Primes p <= pmax passing every filter (class, exclusion, embedding, units,
    good reduction); the complement appears as skip verdicts in sweeps."""
    out = []
    for p in primes_up_to(pmax):
        if _inadmissible_reason(ex, p) is None and _embedding_skip(ex, p) is None:
            out.append(p)
    return out


def _embedding_skip(ex: ExampleRecord, p: int) -> Optional[str]:
    """Reason the surd data cannot be embedded as units at p, or None."""
    try:
        branches = embed_example(ex, p, 1)
    except RamifiedOrNonUnit:
        return "ramified-or-nonunit"
    if branches is None:
        return "lambda-not-in-Zp"
    for lam, alpha, _rhs in branches:
        if lam.value % p == 0:
            return "nonunit-lambda"
        if alpha.value % p == 0:
            return "nonunit-alpha"
        if ex.mu_rule == "equal_lambda":
            try:
                build_curve(ex.d, lam.value % p, p)
            except (InvalidT, BadReduction):
                return "bad-reduction"
    return None


def embed_example(ex: ExampleRecord, p: int, m: int):
    """Embed (lambda, alpha, rhs_symbol) under both conjugate branches.

    Returns a list of (lam, alpha, rhs_symbol or None) Residue triples (one
    triple for rational records), or None when the field is inert at p.
    Raises RamifiedOrNonUnit for ramified p or non-unit denominators.
    """
    D = ex.surd_D
    kind_l, lam_pair = embed_surd(ex.lam, p, m)
    if kind_l != "split":
        return None
    kind_a, alpha_pair = embed_surd(ex.alpha, p, m)
    if kind_a != "split":
        return None
    if ex.rhs_symbol is not None:
        kind_r, rhs_pair = embed_surd(ex.rhs_symbol, p, m)
        if kind_r != "split":
            return None
    else:
        rhs_pair = (None, None)
    if D == 1:
        return [(lam_pair[0], alpha_pair[0], rhs_pair[0])]
    return [
        (lam_pair[0], alpha_pair[0], rhs_pair[0]),
        (lam_pair[1], alpha_pair[1], rhs_pair[1]),
    ]


# --- right-hand sides ------------------------------------------------------


def _ordinary_curve_data(d: int, one_minus_lam: Residue, p: int, split: bool):
    """(a, w) for the fiber at mu = (1 - sqrt(1-lambda))/2: the trace and the
    unit root (split: of T^2-a_pT+p over F_p; inert: of T^2-a_{p^2}T+p^2),
    both to precision p^3.  Returns (a, None) when supersingular."""
    w_int = one_minus_lam.value
    if split:
        s = hensel_sqrt(w_int % p, p, 1)
        mu = (1 - s) * inv_mod(2, p) % p
        a = trace_of_frobenius(build_curve(d, mu, p))
        if a % p == 0:
            return a, None
        return a, unit_root(a, p, p, WORK_PRECISION)
    n = fp2_nonresidue(p)
    c = sqrt_mod_p(w_int * inv_mod(n, p) % p, p)
    inv2 = inv_mod(2, p)
    mu = fp2_element(inv2, -c * inv2 % p, p, n)
    fd = frobenius_over_Fp2(d, mu, p, WORK_PRECISION)
    if not fd.ordinary:
        return fd.a_q, None
    return fd.a_q, fd.unit_root


def rhs_value(ex: ExampleRecord, p: int, m: int, branch):
    """(case_label, rhs Residue or None-for-skip, skip_reason)."""
    lam, _alpha, rhs_sym = branch
    mod = PrimeModulus(p, m)
    if ex.congruence_case == "pm_p":
        if ex.ordinary_symbol % p == 0:
            return "symbol-divisible", None, "symbol-divisible"
        sign = 1 if legendre(ex.ordinary_symbol, p) == 1 else -1
        label = "ordinary" if sign == 1 else "supersingular"
        return label, Residue(sign * p % mod.modulus, mod), None

    if ex.congruence_case == "p_up2_cases":
        if ex.ordinary_symbol % p == 0:
            return "symbol-divisible", None, "symbol-divisible"
        ordinary = legendre(ex.ordinary_symbol, p) == 1
        split_arg = ex.split_symbol.numerator * ex.split_symbol.denominator
        if not ordinary:
            if "p3_ordinary" in ex.modulus_claims and m == 3:
                return "supersingular", None, "supersingular-not-claimed"
            return "supersingular", Residue(0, mod), None
        if split_arg % p == 0:
            return "ramified-mu", None, "ramified-mu"
        split = legendre(split_arg, p) == 1
        one_minus = Residue(1, PrimeModulus(p, WORK_PRECISION)) - _to_prec(lam, p)
        a, w = _ordinary_curve_data(ex.d, one_minus, p, split)
        if w is None:
            return "deuring-mismatch", Residue(0, mod), None
        if split:
            rhs = (w * w * p).reduce(m)
            return "ordinary-split", rhs, None
        kd = legendre(TWIST_CONSTANT[ex.d], p)
        rhs = (w * (-kd * p)).reduce(m)
        return "ordinary-inert", rhs, None

    # signed_p: lhs is the single series, rhs is sgn * chi * p
    one_minus = Residue(1, PrimeModulus(p, WORK_PRECISION)) - _to_prec(lam, p)
    if one_minus.value % p == 0:
        return "ramified-mu", None, "ramified-mu"
    if rhs_sym.value % p == 0:
        return "symbol-divisible", None, "symbol-divisible"
    split = legendre(one_minus.value % p, p) == 1
    a, w = _ordinary_curve_data(ex.d, one_minus, p, split)
    sgn = 1 if a % p != 0 else -1
    chi = legendre(rhs_sym.value % p, p)
    label = "ordinary" if sgn == 1 else "supersingular"
    mod_m = PrimeModulus(p, m)
    return label, Residue(sgn * chi * p % mod_m.modulus, mod_m), None


def _to_prec(r: Residue, p: int) -> Residue:
    """View a Residue computed at the working precision at full p^3 precision."""
    assert r.mod.m == WORK_PRECISION
    return r


# --- verdicts --------------------------------------------------------------

_BRANCH_NAMES = ("+", "-")


def check_example(ex: ExampleRecord, p: int, m: int) -> list[Verdict]:
    """All verdicts (one per embedding branch) for one (example, prime, power)."""
    claim = claim_for(ex, m)
    assert claim is not None, f"{ex.id} has no claim at p^{m}"
    mod = PrimeModulus(p, m)

    def skip(reason, branch="0", case=""):
        return Verdict(ex.id, p, m, branch, case, None, None, mod.modulus, None, reason, claim)

    reason = _inadmissible_reason(ex, p)
    if reason is not None:
        return [skip(reason)]
    try:
        branches = embed_example(ex, p, WORK_PRECISION)
    except RamifiedOrNonUnit:
        return [skip("ramified-or-nonunit")]
    if branches is None:
        return [skip("lambda-not-in-Zp")]
    names = ("0",) if len(branches) == 1 else _BRANCH_NAMES
    out = []
    for name, branch in zip(names, branches):
        lam, alpha, _rhs = branch
        if lam.value % p == 0:
            out.append(skip("nonunit-lambda", name))
            continue
        if alpha.value % p == 0:
            out.append(skip("nonunit-alpha", name))
            continue
        if ex.mu_rule == "equal_lambda":
            try:
                build_curve(ex.d, lam.value % p, p)
            except (InvalidT, BadReduction):
                out.append(skip("bad-reduction", name))
                continue
        case, rhs, skip_reason = rhs_value(ex, p, m, branch)
        if skip_reason is not None:
            out.append(skip(skip_reason, name, case))
            continue
        if ex.congruence_case == "signed_p":
            lhs = trunc_F(alpha.reduce(m), ex.b, lam.reduce(m), p - 1, mod)
        else:
            lhs = trunc_product_F(alpha.reduce(m), ex.b, lam.reduce(m), p - 1, mod)
        passed = lhs.value == rhs.value
        out.append(
            Verdict(ex.id, p, m, name, case, lhs.value, rhs.value, mod.modulus, passed, None, claim)
        )
    live = [v for v in out if not v.skipped]
    if len({v.passed for v in live}) > 1:
        raise BranchAsymmetry(f"{ex.id} p={p} m={m}: conjugate branches disagree")
    return out


def _sweep_unit(args):
    ex, p, powers = args
    verdicts = []
    for m in powers:
        if claim_for(ex, m) is not None:
            verdicts.extend(check_example(ex, p, m))
    return verdicts


def run_sweep(
    ids: list[str],
    pmax: int,
    powers: list[int],
    catalog: Catalog,
    parallel: int = 0,
) -> Report:
    """Deterministic sweep over (example, prime, modulus power)."""
    if pmax > 10**4:
        raise ValueError("pmax capped at 10^4")
    report = Report(catalog.version, list(ids), pmax, sorted(powers))
    tasks = []
    for exid in ids:
        ex = catalog.get(exid)
        if not any(claim_for(ex, m) for m in powers):
            continue
        for p in primes_up_to(pmax):
            tasks.append((ex, p, tuple(sorted(powers))))
    if parallel and parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            chunks = list(pool.map(_sweep_unit, tasks, chunksize=8))
    else:
        chunks = [_sweep_unit(t) for t in tasks]
    for chunk in chunks:
        report.verdicts.extend(chunk)
    return report


# --- trichotomy checks at the weight-3 lambda values -----------------------


def check_weight3_trichotomy(d: int, lam: Fraction, p: int, m: int) -> Verdict:
    """Truncated 3F2-style series against the 0 / u_p^2 / (k_d/p)u_p^2 trichotomy."""
    mod = PrimeModulus(p, m)
    case_id = f"{lam}@{d}"

    def skip(reason):
        return Verdict(case_id, p, m, "0", "", None, None, mod.modulus, None, reason, "positive")

    if p < 5 or lam.numerator % p == 0 or lam.denominator % p == 0:
        return skip("nonunit-lambda")
    one_minus = 1 - lam
    if one_minus.numerator % p == 0:
        return skip("ramified-mu")
    if one_minus.denominator % p == 0:
        return skip("nonunit-lambda")
    work = PrimeModulus(p, WORK_PRECISION)
    w_res = frac_mod(one_minus, work)
    split = legendre(w_res.value % p, p) == 1
    a, w = _ordinary_curve_data(d, w_res, p, split)
    if w is None:
        case, rhs = "supersingular", Residue(0, mod)
    elif split:
        case, rhs = "ordinary-split", (w * w).reduce(m)
    else:
        kd = legendre(TWIST_CONSTANT[d], p)
        case, rhs = "ordinary-inert", (w * kd).reduce(m)
    lam_res = frac_mod(lam, mod)
    lhs = trunc_F(Residue(0, mod), b_params(d, with_half=True), lam_res, p - 1, mod)
    passed = lhs.value == rhs.value
    return Verdict(case_id, p, m, "0", case, lhs.value, rhs.value, mod.modulus, passed, None, "positive")


def ap_form(case: Weight3Case, p: int) -> int:
    """The weight-3 eigenform coefficient a_p(f) reconstructed from unit roots.

    0 when the fiber is supersingular; otherwise the unique integer in
    [-2p, 2p] congruent to (k_d/p) * (w + p^2/w) mod p^3, where w is the
    split-case product of the two conjugate unit roots or the inert-case
    unit root over F_{p^2}.
    """
    if p < 5:
        raise ValueError("p must be >= 5")
    lam = case.lam
    if lam.numerator % p == 0 or lam.denominator % p == 0:
        raise ValueError(f"lambda = {lam} is not a unit at {p}")
    if legendre(_nonzero(case.K_CM, p), p) != 1:
        return 0
    one_minus = 1 - lam
    assert one_minus.numerator % p != 0, f"ordinary but ramified at {p}"
    work = PrimeModulus(p, WORK_PRECISION)
    w_res = frac_mod(one_minus, work)
    split = legendre(w_res.value % p, p) == 1
    if split:
        s = hensel_sqrt(w_res.value % p, p, 1)
        inv2 = inv_mod(2, p)
        w_prod = Residue(1, work)
        for mu in ((1 - s) * inv2 % p, (1 + s) * inv2 % p):
            a = trace_of_frobenius(build_curve(case.d, mu, p))
            assert a % p != 0, f"Deuring mismatch at {p}"
            w_prod = w_prod * unit_root(a, p, p, WORK_PRECISION)
    else:
        _a, w_prod = _ordinary_curve_data(case.d, w_res, p, split=False)
        assert w_prod is not None, f"Deuring mismatch at {p}"
    kd = legendre(TWIST_CONSTANT[case.d], p)
    p3 = p**3
    target = kd * (w_prod.value + p * p * inv_mod(w_prod.value, p3)) % p3
    hits = [a for a in range(-2 * p, 2 * p + 1) if (a - target) % p3 == 0]
    if len(hits) != 1:
        raise AmbiguousRounding(f"case {case.case}, p={p}: candidates {hits}")
    return hits[0]


def _nonzero(n: int, p: int) -> int:
    if n % p == 0:
        raise ValueError(f"p = {p} divides the Deuring symbol argument {n}")
    return n


def check_ap_truncation(case: Weight3Case, p: int) -> Verdict:
    """Truncation mod p^2 equals the reconstructed eigenform coefficient."""
    mod = PrimeModulus(p, 2)
    case_id = f"ap:{case.case}"
    if p < case.pmin or p in case.excluded:
        return Verdict(case_id, p, 2, "0", "", None, None, mod.modulus, None, "inadmissible", "positive")
    ap = ap_form(case, p)
    lam_res = frac_mod(case.lam, mod)
    lhs = trunc_F(Residue(0, mod), b_params(case.d, with_half=True), lam_res, p - 1, mod)
    rhs = ap % mod.modulus
    label = "supersingular" if ap == 0 else "ordinary"
    return Verdict(case_id, p, 2, "0", label, lhs.value, rhs, mod.modulus, lhs.value == rhs, None, "positive")


# --- Deuring consistency ---------------------------------------------------


def deuring_consistency(ex: ExampleRecord, pmax: int) -> list[tuple[int, str, bool]]:
    """Point-count ordinariness of the fiber at mu vs the Legendre prediction.

    Returns (p, branch, agree) rows for every admissible p <= pmax; records
    without a stated Deuring symbol yield no rows.
    """
    if ex.ordinary_symbol is None:
        return []
    rows = []
    for p in admissible_primes(ex, pmax):
        if ex.ordinary_symbol % p == 0:
            continue
        predicted = legendre(ex.ordinary_symbol, p) == 1
        branches = embed_example(ex, p, WORK_PRECISION)
        names = ("0",) if len(branches) == 1 else _BRANCH_NAMES
        for name, (lam, _alpha, _rhs) in zip(names, branches):
            if ex.mu_rule == "equal_lambda":
                a = trace_of_frobenius(build_curve(ex.d, lam.value % p, p))
            else:
                one_minus = Residue(1, PrimeModulus(p, WORK_PRECISION)) - lam
                if one_minus.value % p == 0:
                    continue
                split = legendre(one_minus.value % p, p) == 1
                a, _w = _ordinary_curve_data(ex.d, one_minus, p, split)
            rows.append((p, name, (a % p != 0) == predicted))
    return rows
