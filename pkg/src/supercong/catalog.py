"""Catalog of congruence examples and analytic configuration data.

The catalog ships as a JSON file inside the package and can be overridden by
a path (CLI flag) or the SUPERCONG_CATALOG environment variable; the flag
wins.  Each example record carries every parameter and prime condition of
one congruence statement, stored literally.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .arith import QuadSurd

ENV_VAR = "SUPERCONG_CATALOG"

VALID_D = (2, 3, 4, 6)
VALID_MU_RULES = ("equal_lambda", "half_minus_sqrt")
VALID_CASES = ("pm_p", "p_up2_cases", "signed_p")
VALID_CLAIMS = ("p2", "p3", "p3_negative", "p3_ordinary")


class CatalogError(ValueError):
    """Malformed catalog file or record."""


def _parse_surd(obj) -> QuadSurd:
    try:
        return QuadSurd(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["D"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad surd {obj!r}: {exc}") from exc


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    ref: str
    d: int
    b: tuple[Fraction, ...]
    alpha: QuadSurd
    lam: QuadSurd
    mu_rule: str
    N: int
    congruence_case: str
    modulus_claims: frozenset[str]
    pmin: int
    excluded: tuple[int, ...]
    classes: Optional[tuple[int, tuple[int, ...]]] = None
    ordinary_symbol: Optional[int] = None
    split_symbol: Optional[Fraction] = None
    rhs_symbol: Optional[QuadSurd] = None
    K_CM: Optional[int] = None
    lmfdb: Optional[str] = None
    delta: Optional[str] = None

    @property
    def surd_D(self) -> int:
        """The common quadratic field discriminant of the record's surds (1 if rational)."""
        ds = {s.D for s in (self.alpha, self.lam, self.rhs_symbol) if s is not None and s.D != 1}
        if len(ds) > 1:
            raise CatalogError(f"record {self.id} mixes fields {ds}")
        return ds.pop() if ds else 1

    @property
    def with_half(self) -> bool:
        return len(self.b) == 3

    def validate(self) -> None:
        if self.d not in VALID_D:
            raise CatalogError(f"{self.id}: d = {self.d}")
        if self.mu_rule not in VALID_MU_RULES:
            raise CatalogError(f"{self.id}: mu_rule {self.mu_rule}")
        if self.congruence_case not in VALID_CASES:
            raise CatalogError(f"{self.id}: case {self.congruence_case}")
        if not self.modulus_claims or not self.modulus_claims <= set(VALID_CLAIMS):
            raise CatalogError(f"{self.id}: claims {set(self.modulus_claims)}")
        if len(self.b) not in (2, 3):
            raise CatalogError(f"{self.id}: b has length {len(self.b)}")
        for bi in self.b:
            if not 0 < bi < 1 or bi.denominator not in (2, 3, 4, 6):
                raise CatalogError(f"{self.id}: bad parameter {bi}")
        if self.congruence_case == "pm_p":
            if self.with_half or self.ordinary_symbol is None:
                raise CatalogError(f"{self.id}: malformed two-parameter record")
        if self.congruence_case == "p_up2_cases":
            if not self.with_half or self.ordinary_symbol is None or self.split_symbol is None:
                raise CatalogError(f"{self.id}: malformed three-parameter record")
        if self.congruence_case == "signed_p" and self.rhs_symbol is None:
            raise CatalogError(f"{self.id}: missing rhs symbol")
        if self.pmin < 3:
            raise CatalogError(f"{self.id}: pmin {self.pmin}")
        if self.classes is not None:
            mod, residues = self.classes
            if not residues or any(not 0 <= r < mod for r in residues):
                raise CatalogError(f"{self.id}: bad congruence classes")
        self.surd_D  # raises on mixed fields


@dataclass(frozen=True)
class OmegaField:
    """Chowla-Selberg inputs for one imaginary quadratic field.

    Provenance: D is the fundamental discriminant magnitude, h the class
    number, n the number of roots of unity; the source uses these fields
    without tabulating the data, so the values are standard references
    (h(-8)=h(-3)=1, h(-24)=h(-15)=2; n=6 only for Q(sqrt(-3))).
    """

    disc: int
    D: int
    h: int
    n: int


@dataclass(frozen=True)
class SpecialValue:
    id: str
    d: int
    lam: Fraction
    factor: str
    field: int
    two_param_b: tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Weight3Case:
    case: str
    d: int
    lam: Fraction
    K_CM: int
    lmfdb: str
    pmin: int
    excluded: tuple[int, ...]
    eta_oracle: bool = False


@dataclass(frozen=True)
class Catalog:
    version: str
    comment: str
    examples: tuple[ExampleRecord, ...]
    omega_fields: dict[int, OmegaField]
    special_values: tuple[SpecialValue, ...]
    weight3_cases: tuple[Weight3Case, ...]
    source_path: Optional[str] = None
    by_id: dict[str, ExampleRecord] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {ex.id: ex for ex in self.examples})

    def get(self, example_id: str) -> ExampleRecord:
        try:
            return self.by_id[example_id]
        except KeyError:
            raise CatalogError(f"unknown example id {example_id!r}") from None

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def validate(self) -> None:
        if len(self.by_id) != len(self.examples):
            raise CatalogError("duplicate example ids")
        for ex in self.examples:
            ex.validate()
        for w in self.weight3_cases:
            if w.K_CM not in self.omega_fields:
                raise CatalogError(f"weight-3 case {w.case}: no omega data for {w.K_CM}")
        for sv in self.special_values:
            if sv.field not in self.omega_fields:
                raise CatalogError(f"special value {sv.id}: no omega data for {sv.field}")


def expand_ids(spec: str, catalog: Catalog) -> list[str]:
    """Parse an id selection like "A,C" or "A-K" or "A-E,P,Q" in catalog order."""
    order = catalog.ids()
    chosen: list[str] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (s.strip() for s in part.split("-", 1))
            if lo not in order or hi not in order:
                raise CatalogError(f"bad id range {part!r}")
            i, j = order.index(lo), order.index(hi)
            if i > j:
                raise CatalogError(f"empty id range {part!r}")
            chosen.extend(order[i : j + 1])
        else:
            catalog.get(part)
            chosen.append(part)
    seen = set()
    out = []
    for x in chosen:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _parse_example(obj: dict) -> ExampleRecord:
    classes = None
    if obj.get("classes"):
        classes = (int(obj["classes"]["mod"]), tuple(int(r) for r in obj["classes"]["residues"]))
    split = obj.get("split_symbol")
    return ExampleRecord(
        id=str(obj["id"]),
        ref=str(obj.get("ref", "")),
        d=int(obj["d"]),
        b=tuple(Fraction(x) for x in obj["b"]),
        alpha=_parse_surd(obj["alpha"]),
        lam=_parse_surd(obj["lambda"]),
        mu_rule=str(obj["mu_rule"]),
        N=int(obj["N"]),
        congruence_case=str(obj["congruence_case"]),
        modulus_claims=frozenset(obj["modulus_claims"]),
        pmin=int(obj["pmin"]),
        excluded=tuple(int(x) for x in obj.get("excluded", [])),
        classes=classes,
        ordinary_symbol=obj.get("ordinary_symbol"),
        split_symbol=Fraction(split) if split is not None else None,
        rhs_symbol=_parse_surd(obj["rhs_symbol"]) if obj.get("rhs_symbol") else None,
        K_CM=obj.get("K_CM"),
        lmfdb=obj.get("lmfdb"),
        delta=obj.get("delta"),
    )


def _parse_catalog(raw: dict, source_path: Optional[str]) -> Catalog:
    try:
        examples = tuple(_parse_example(o) for o in raw["examples"])
        omega = {
            int(k): OmegaField(disc=int(k), D=int(v["D"]), h=int(v["h"]), n=int(v["n"]))
            for k, v in raw["omega_fields"].items()
        }
        specials = tuple(
            SpecialValue(
                id=str(o["id"]),
                d=int(o["d"]),
                lam=Fraction(o["lambda"]),
                factor=str(o["factor"]),
                field=int(o["field"]),
                two_param_b=tuple(Fraction(x) for x in o["two_param_b"]),
            )
            for o in raw["special_values"]
        )
        weight3 = tuple(
            Weight3Case(
                case=str(o["case"]),
                d=int(o["d"]),
                lam=Fraction(o["lambda"]),
                K_CM=int(o["K_CM"]),
                lmfdb=str(o["lmfdb"]),
                pmin=int(o["pmin"]),
                excluded=tuple(int(x) for x in o.get("excluded", [])),
                eta_oracle=bool(o.get("eta_oracle", False)),
            )
            for o in raw["weight3_cases"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed catalog: {exc}") from exc
    cat = Catalog(
        version=str(raw.get("version", "?")),
        comment=str(raw.get("comment", "")),
        examples=examples,
        omega_fields=omega,
        special_values=specials,
        weight3_cases=weight3,
        source_path=source_path,
    )
    cat.validate()
    return cat


def load_catalog(path: Optional[str] = None) -> Catalog:
    """Load the catalog: explicit path > SUPERCONG_CATALOG env var > packaged data."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        return _parse_catalog(raw, path)
    text = resources.files("supercong").joinpath("data/catalog.json").read_text("utf-8")
    return _parse_catalog(json.loads(text), None)
