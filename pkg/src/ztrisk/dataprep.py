"""Incident-data pipeline: SMB matching, attack classification, probability estimation.

The pipeline mirrors the published procedure for turning a raw incident export
into model parameters:

1. filter_smb_incidents - keep US incidents whose company matches a US SMB by
   normalized name, de-duplicated by MSCAD_ID.
2. classify_attacks - rule-based keyword classification into four attack types
   (insider has its own branch driven by the actor field), else "unassigned".
3. attack_priors - Laplace-smoothed priors (count+1)/(N+K).
4. asset_conditionals - P(asset | attack) from the mapped proximate causes.
5. breach_strengths - breach share per asset, leak = unmapped share, and
   strength s_j = P_j / (1 - leak).

All stages are pure functions over typed records; CSV ingestion lives at the
edges and raises MissingColumn before any math runs.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

UNASSIGNED = "unassigned"

SMB_NAME_COLUMN = "COMPANY NAME"
SMB_EMPLOYEES_COLUMN = "TOTAL EMPLOYEES"
SMB_COUNTRY_COLUMN = "HQ COUNTRY"
SMB_COLUMNS = (SMB_NAME_COLUMN, SMB_EMPLOYEES_COLUMN, SMB_COUNTRY_COLUMN)

INCIDENT_COLUMNS = (
    "COMPANY_NAME",
    "COUNTRY_CODE",
    "MSCAD_ID",
    "CASE_TYPE",
    "CASE_DESCRIPTION",
    "PRODUCT_SERVICE_INVOLVED",
    "PROXIMATE_CAUSE",
)

# Versioned normalization config: corporate suffix tokens stripped from the end
# of a cleaned company name, and accepted spellings of the US.
CORPORATE_SUFFIXES = ("inc", "llc", "ltd", "corp", "co")
US_COUNTRY_NAMES = frozenset(
    {"united states", "united states of america", "usa", "us", "u.s.", "u.s.a."}
)
US_COUNTRY_CODES = frozenset({"USA", "US"})

_PUNCT = re.compile(r"[^\w\s]", flags=re.UNICODE)
_WS = re.compile(r"\s+")


class MissingColumn(ValueError):
    """A required input column is absent; the message names it."""


class CountExceedsTotal(ValueError):
    """Per-category counts sum to more than the stated total."""


class EmptyBreachSet(ValueError):
    """The breach filter matched no incidents."""


@dataclass(frozen=True)
class IncidentRecord:
    """One incident row; actor_type carries the PRODUCT_SERVICE_INVOLVED field."""

    mscad_id: str
    company_name: str
    country_code: str
    case_type: str
    case_description: str
    actor_type: str
    proximate_cause: str

    def __post_init__(self) -> None:
        if not self.mscad_id.strip():
            raise ValueError("mscad_id must be nonempty")


def clean_company_name(raw: str) -> str:
    """Case-fold, strip punctuation, drop trailing corporate suffixes, squeeze spaces."""
    text = _WS.sub(" ", _PUNCT.sub(" ", raw.casefold())).strip()
    tokens = text.split(" ") if text else []
    while len(tokens) > 1 and tokens[-1] in CORPORATE_SUFFIXES:
        tokens.pop()
    return " ".join(tokens)


def normalize_country(raw: str) -> str:
    """Country-name normalization for the SMB list; US spellings collapse."""
    text = _WS.sub(" ", raw.strip().casefold())
    return "United States" if text in US_COUNTRY_NAMES else raw.strip()


def is_us_country_code(raw: str) -> bool:
    return raw.strip().upper() in US_COUNTRY_CODES


def _standardize_header(name: str) -> str:
    return _WS.sub(" ", name.strip().upper())


def _read_rows(path: str | Path, required: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            raw_header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{path}: empty file, required columns {list(required)}")
        header = [_standardize_header(h) for h in raw_header]
        for column in required:
            if column not in header:
                raise MissingColumn(f"{path}: missing required column {column!r}")
        rows = []
        for values in reader:
            row = {h: (values[i] if i < len(values) else "") for i, h in enumerate(header)}
            rows.append(row)
    return rows


def read_smb_csv(path: str | Path) -> list[dict[str, str]]:
    return _read_rows(path, SMB_COLUMNS)


def read_incident_csv(path: str | Path) -> list[IncidentRecord]:
    rows = _read_rows(path, INCIDENT_COLUMNS)
    return [
        IncidentRecord(
            mscad_id=row["MSCAD_ID"].strip(),
            company_name=row["COMPANY_NAME"],
            country_code=row["COUNTRY_CODE"],
            case_type=row["CASE_TYPE"],
            case_description=row["CASE_DESCRIPTION"],
            actor_type=row["PRODUCT_SERVICE_INVOLVED"],
            proximate_cause=row["PROXIMATE_CAUSE"],
        )
        for row in rows
    ]


@dataclass(frozen=True)
class FilterCounts:
    smbs_total: int
    smbs_us: int
    incidents_total: int
    incidents_us: int
    matched_raw: int
    duplicates_removed: int
    matched: int


@dataclass(frozen=True)
class FilterResult:
    matched: tuple[IncidentRecord, ...]
    counts: FilterCounts


def filter_smb_incidents(smb_rows: Sequence[Mapping[str, str]],
                         incident_rows: Sequence[IncidentRecord]) -> FilterResult:
    """US-SMB name matching with MSCAD_ID de-duplication (first occurrence wins)."""
    for row in smb_rows:
        for column in (SMB_NAME_COLUMN, SMB_COUNTRY_COLUMN):
            if column not in row:
                raise MissingColumn(f"SMB row missing column {column!r}")

    us_names = set()
    smbs_us = 0
    for row in smb_rows:
        if normalize_country(row[SMB_COUNTRY_COLUMN]) != "United States":
            continue
        smbs_us += 1
        us_names.add(clean_company_name(row[SMB_NAME_COLUMN]))

    us_incidents = [rec for rec in incident_rows if is_us_country_code(rec.country_code)]
    matched_raw = [
        rec for rec in us_incidents if clean_company_name(rec.company_name) in us_names
    ]

    seen_ids: set[str] = set()
    matched: list[IncidentRecord] = []
    for rec in matched_raw:
        key = rec.mscad_id.strip()
        if key in seen_ids:
            continue
        seen_ids.add(key)
        matched.append(rec)

    return FilterResult(
        matched=tuple(matched),
        counts=FilterCounts(
            smbs_total=len(smb_rows),
            smbs_us=smbs_us,
            incidents_total=len(incident_rows),
            incidents_us=len(us_incidents),
            matched_raw=len(matched_raw),
            duplicates_removed=len(matched_raw) - len(matched),
            matched=len(matched),
        ),
    )


RULE_GENERIC = "generic"
RULE_INSIDER = "insider"


@dataclass(frozen=True)
class AttackRule:
    attack: str
    case_type_keywords: tuple[str, ...] = ()
    description_keywords: tuple[str, ...] = ()
    actor_values: tuple[str, ...] = ()
    kind: str = RULE_GENERIC

    def __post_init__(self) -> None:
        if self.kind not in (RULE_GENERIC, RULE_INSIDER):
            raise ValueError(f"unknown rule kind {self.kind!r}")


@dataclass(frozen=True)
class ClassificationRules:
    """Rules evaluated in declaration order; the first matching rule labels the
    incident, so declaration order is the multi-match precedence."""

    rules: tuple[AttackRule, ...]

    def __post_init__(self) -> None:
        if len(self.rules) < 1:
            raise ValueError("at least one rule required")
        attacks = [r.attack for r in self.rules]
        if len(set(attacks)) != len(attacks):
            raise ValueError("duplicate attack type in rules")

    @property
    def attacks(self) -> tuple[str, ...]:
        return tuple(r.attack for r in self.rules)


DEFAULT_RULES = ClassificationRules(
    rules=(
        AttackRule(
            attack="insider",
            case_type_keywords=("insider threat",),
            description_keywords=("insider", "disgruntled employee"),
            kind=RULE_INSIDER,
        ),
        AttackRule(
            attack="credential",
            case_type_keywords=("unauthorized access",),
            description_keywords=(
                "stolen credentials",
                "compromised password",
                "credential stuffing",
                "brute force",
            ),
        ),
        AttackRule(
            attack="phishing",
            case_type_keywords=("phishing",),
            description_keywords=("phishing", "spoofed email"),
        ),
        AttackRule(
            attack="lost_stolen",
            case_type_keywords=("lost", "stolen"),
            description_keywords=(
                "lost laptop",
                "stolen laptop",
                "lost device",
                "stolen device",
                "missing equipment",
            ),
        ),
    )
)

ATTACK_LABELS = {
    "phishing": "Phishing & Social Engineering",
    "credential": "Credential-Based Attacks",
    "insider": "Insider Threats",
    "lost_stolen": "Physically Lost or Stolen Assets",
    UNASSIGNED: "Unassigned",
}


def _contains_any(text: str, keywords: Sequence[str]) -> bool:
    lowered = text.casefold()
    return any(kw.casefold() in lowered for kw in keywords)


def _matches_rule(record: IncidentRecord, rule: AttackRule) -> bool:
    if rule.kind == RULE_INSIDER:
        if _contains_any(record.case_type, rule.case_type_keywords):
            return True
        actor = record.actor_type.strip()
        if actor == "Internal":
            return True
        if not actor:
            return _contains_any(record.case_description, rule.description_keywords)
        return False

    matched = False
    if rule.case_type_keywords:
        matched = matched or _contains_any(record.case_type, rule.case_type_keywords)
    if rule.description_keywords:
        matched = matched or _contains_any(record.case_description, rule.description_keywords)
    if rule.actor_values and matched:
        matched = record.actor_type.strip() in rule.actor_values
    return matched


@dataclass(frozen=True)
class AttackAssignment:
    record: IncidentRecord
    attack: str  # rule attack id or UNASSIGNED


def classify_attacks(incidents: Sequence[IncidentRecord],
                     rules: ClassificationRules = DEFAULT_RULES) -> tuple[AttackAssignment, ...]:
    """Label each incident with the first matching rule, else UNASSIGNED."""
    out = []
    for record in incidents:
        label = UNASSIGNED
        for rule in rules.rules:
            if _matches_rule(record, rule):
                label = rule.attack
                break
        out.append(AttackAssignment(record=record, attack=label))
    return tuple(out)


def count_attacks(assignments: Sequence[AttackAssignment],
                  rules: ClassificationRules = DEFAULT_RULES) -> dict[str, int]:
    counts = {attack: 0 for attack in rules.attacks}
    counts[UNASSIGNED] = 0
    for assignment in assignments:
        counts[assignment.attack] += 1
    return counts


def attack_priors(counts: Mapping[str, int], total: int,
                  categories: int | None = None) -> dict[str, float]:
    """Laplace-smoothed priors (count + 1) / (total + K)."""
    if categories is None:
        categories = len(counts)
    if categories < 1:
        raise ValueError("need at least one category")
    assigned = sum(counts.values())
    if assigned > total:
        raise CountExceedsTotal(f"counts sum to {assigned} > total {total}")
    return {attack: (c + 1) / (total + categories) for attack, c in counts.items()}


ASSETS = (
    "server",
    "email",
    "website",
    "printed_records",
    "user_devices",
    "software",
    "portable_storage",
)

ASSET_LABELS = {
    "server": "Server",
    "email": "Email",
    "website": "Website",
    "printed_records": "Printed Records",
    "user_devices": "User Devices",
    "software": "Software",
    "portable_storage": "Portable Data Storage Instruments",
}

# Versioned mapping from proximate-cause phrasings to modeled asset categories.
DEFAULT_CAUSE_MAPPING: dict[str, str] = {
    "server": "server",
    "network server": "server",
    "e-mail": "email",
    "email": "email",
    "website": "website",
    "web application": "website",
    "printed records": "printed_records",
    "paper documents": "printed_records",
    "laptop/desktop": "user_devices",
    "user devices": "user_devices",
    "software": "software",
    "software application": "software",
    "portable data storage": "portable_storage",
    "usb drive": "portable_storage",
}


def map_cause_to_asset(cause: str,
                       mapping: Mapping[str, str] = DEFAULT_CAUSE_MAPPING) -> str | None:
    key = _WS.sub(" ", cause.strip().casefold())
    return mapping.get(key) if key else None


@dataclass(frozen=True)
class AttackAssetRow:
    attack: str
    asset: str
    count: int
    probability: float


@dataclass(frozen=True)
class ConditionalTable:
    rows: tuple[AttackAssetRow, ...]
    mapped_per_attack: Mapping[str, int]
    dropped_per_attack: Mapping[str, int]

    def probability(self, attack: str, asset: str) -> float:
        for row in self.rows:
            if row.attack == attack and row.asset == asset:
                return row.probability
        return 0.0

    def count(self, attack: str, asset: str) -> int:
        for row in self.rows:
            if row.attack == attack and row.asset == asset:
                return row.count
        return 0


def asset_conditionals(assignments: Sequence[AttackAssignment],
                       mapping: Mapping[str, str] = DEFAULT_CAUSE_MAPPING) -> ConditionalTable:
    """P(asset | attack) over mapped causes; blank or unmappable causes drop."""
    missing = {asset for asset in ASSETS if asset not in mapping.values()}
    if missing:
        raise ValueError(f"cause mapping covers no causes for assets {sorted(missing)}")

    per_attack: dict[str, dict[str, int]] = {}
    dropped: dict[str, int] = {}
    for assignment in assignments:
        if assignment.attack == UNASSIGNED:
            continue
        asset = map_cause_to_asset(assignment.record.proximate_cause, mapping)
        bucket = per_attack.setdefault(assignment.attack, {})
        dropped.setdefault(assignment.attack, 0)
        if asset is None:
            dropped[assignment.attack] += 1
            continue
        bucket[asset] = bucket.get(asset, 0) + 1

    rows: list[AttackAssetRow] = []
    mapped_totals: dict[str, int] = {}
    for attack, bucket in per_attack.items():
        total = sum(bucket.values())
        mapped_totals[attack] = total
        for asset, count in sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0])):
            rows.append(
                AttackAssetRow(
                    attack=attack, asset=asset, count=count, probability=count / total
                )
            )
    return ConditionalTable(
        rows=tuple(rows), mapped_per_attack=mapped_totals, dropped_per_attack=dropped
    )


BREACH_CASE_TYPE = "malicious breach"
BREACH_DESCRIPTION_KEYWORD = "breach"


def is_breach(record: IncidentRecord) -> bool:
    if record.case_type.strip().casefold() == BREACH_CASE_TYPE:
        return True
    return BREACH_DESCRIPTION_KEYWORD in record.case_description.casefold()


@dataclass(frozen=True)
class BreachRow:
    asset: str
    count: int
    share: float      # P_j = n_j / N
    strength: float   # s_j = P_j / (1 - l)


@dataclass(frozen=True)
class BreachStrengthTable:
    rows: tuple[BreachRow, ...]
    unmapped: int
    total: int
    leak: float

    def __post_init__(self) -> None:
        share_sum = sum(r.share for r in self.rows) + self.leak
        if abs(share_sum - 1.0) > 1e-9:
            raise ValueError(f"shares plus leak sum to {share_sum}, expected 1")
        for r in self.rows:
            if abs(r.strength * (1.0 - self.leak) - r.share) > 1e-9:
                raise ValueError(f"strength identity violated for {r.asset}")
            if not (0.0 <= r.share <= 1.0 and 0.0 <= r.strength <= 1.0):
                raise ValueError(f"probabilities out of range for {r.asset}")

    def strength(self, asset: str) -> float:
        for row in self.rows:
            if row.asset == asset:
                return row.strength
        return 0.0


def breach_strengths(records: Sequence[IncidentRecord],
                     mapping: Mapping[str, str] = DEFAULT_CAUSE_MAPPING) -> BreachStrengthTable:
    """Per-asset breach shares and strengths with leak = unmapped share.

    Applies the breach filter (case type or description keyword), de-duplicates
    by MSCAD_ID, then maps each breach to an asset via the proximate cause.
    """
    seen: set[str] = set()
    breaches: list[IncidentRecord] = []
    for record in records:
        if not is_breach(record):
            continue
        key = record.mscad_id.strip()
        if key in seen:
            continue
        seen.add(key)
        breaches.append(record)
    if not breaches:
        raise EmptyBreachSet("no incidents pass the breach filter")

    counts: dict[str, int] = {}
    unmapped = 0
    for record in breaches:
        asset = map_cause_to_asset(record.proximate_cause, mapping)
        if asset is None:
            unmapped += 1
        else:
            counts[asset] = counts.get(asset, 0) + 1

    total = len(breaches)
    leak = unmapped / total
    rows = tuple(
        BreachRow(
            asset=asset,
            count=count,
            share=count / total,
            strength=(count / total) / (1.0 - leak) if leak < 1.0 else 0.0,
        )
        for asset, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    return BreachStrengthTable(rows=rows, unmapped=unmapped, total=total, leak=leak)


def summary_json(counts: FilterCounts, attack_counts: Mapping[str, int],
                 priors: Mapping[str, float], conditionals: ConditionalTable,
                 breaches: BreachStrengthTable) -> dict:
    """One JSON-ready document with every count the pipeline produced."""
    return {
        "filter": {
            "smbs_total": counts.smbs_total,
            "smbs_us": counts.smbs_us,
            "incidents_total": counts.incidents_total,
            "incidents_us": counts.incidents_us,
            "matched_raw": counts.matched_raw,
            "duplicates_removed": counts.duplicates_removed,
            "matched": counts.matched,
        },
        "attacks": dict(attack_counts),
        "priors": dict(priors),
        "conditionals": {
            attack: {
                "total_mapped": conditionals.mapped_per_attack.get(attack, 0),
                "dropped": conditionals.dropped_per_attack.get(attack, 0),
                "assets": {
                    row.asset: row.count
                    for row in conditionals.rows
                    if row.attack == attack
                },
            }
            for attack in sorted(
                set(conditionals.mapped_per_attack) | set(conditionals.dropped_per_attack)
            )
        },
        "breach": {
            "total": breaches.total,
            "unmapped": breaches.unmapped,
            "leak": breaches.leak,
            "assets": {row.asset: row.count for row in breaches.rows},
        },
    }
