"""Deterministic synthetic SMB/incident fixtures with a ground-truth sidecar.

A FixtureProfile states, cell by cell, how many incidents of each
(attack, asset, breach) combination the matched set must contain, plus how
much non-matching noise surrounds it. The generator plants keyword-bearing
descriptions and case types so the default classification rules recover the
planted labels exactly, and writes the intended counts to a JSON sidecar so
tests can assert the pipeline output against the generator's own bookkeeping.

The default profile reproduces the published count structure end to end:
1,486 matched incidents, attack totals 48/510/713/156 with 59 unassigned,
the per-attack asset tables, and a 659-incident breach subset with 84
unmapped rows. The small profile is a fast smoke fixture (22 matched).

Same seed, same profile, same bytes: ordering is shuffled by a seeded PCG64
stream and nothing else is nondeterministic.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .dataprep import (
    ASSETS,
    INCIDENT_COLUMNS,
    SMB_COLUMNS,
    UNASSIGNED,
    attack_priors,
)
from .priors import RandomStream


class InfeasibleProfile(ValueError):
    """The profile's counts cannot be realized as a consistent dataset."""


@dataclass(frozen=True)
class CellPlan:
    """Matched incidents sharing one attack label and proximate-cause asset.

    asset "" means a blank proximate cause (dropped by the conditional table,
    counted as unmapped by the breach table). breaches of the cell's count
    are additionally labeled as breaches.
    """

    attack: str
    asset: str
    count: int
    breaches: int = 0


@dataclass(frozen=True)
class FixtureProfile:
    name: str
    us_smbs: int
    foreign_smbs: int
    us_nonmatching: int
    foreign_incidents: int
    duplicate_ids: int
    cells: tuple[CellPlan, ...]
    unassigned: int

    def __post_init__(self) -> None:
        numbers = (
            self.us_smbs, self.foreign_smbs, self.us_nonmatching,
            self.foreign_incidents, self.duplicate_ids, self.unassigned,
        )
        if any(n < 0 for n in numbers):
            raise InfeasibleProfile("negative counts are not realizable")
        for cell in self.cells:
            if cell.count < 0 or cell.breaches < 0:
                raise InfeasibleProfile(f"negative count in cell {cell}")
            if cell.breaches > cell.count:
                raise InfeasibleProfile(
                    f"cell {cell.attack}/{cell.asset or 'blank'}: "
                    f"{cell.breaches} breaches > {cell.count} incidents"
                )
            if cell.asset and cell.asset not in ASSETS:
                raise InfeasibleProfile(f"unknown asset {cell.asset!r}")
        if self.matched_total > 0 and self.us_smbs < 1:
            raise InfeasibleProfile("matched incidents require at least one US SMB")
        if self.duplicate_ids > self.matched_total:
            raise InfeasibleProfile("more duplicate ids than matched incidents")

    @property
    def matched_total(self) -> int:
        return sum(c.count for c in self.cells) + self.unassigned


def default_profile() -> FixtureProfile:
    """Full-size profile matching the published incident count structure."""
    cells = (
        CellPlan("phishing", "email", 43, breaches=43),
        CellPlan("phishing", "server", 3, breaches=3),
        CellPlan("phishing", "", 2, breaches=2),
        CellPlan("credential", "server", 267, breaches=267),
        CellPlan("credential", "website", 22, breaches=22),
        CellPlan("credential", "email", 19, breaches=12),
        CellPlan("credential", "user_devices", 5, breaches=5),
        CellPlan("credential", "printed_records", 2, breaches=2),
        CellPlan("credential", "portable_storage", 1, breaches=1),
        CellPlan("credential", "", 194, breaches=82),
        CellPlan("insider", "printed_records", 291, breaches=100),
        CellPlan("insider", "server", 137, breaches=85),
        CellPlan("insider", "email", 36, breaches=0),
        CellPlan("insider", "website", 20, breaches=6),
        CellPlan("insider", "portable_storage", 11, breaches=9),
        CellPlan("insider", "user_devices", 5, breaches=5),
        CellPlan("insider", "software", 2, breaches=0),
        CellPlan("insider", "", 211, breaches=0),
        CellPlan("lost_stolen", "user_devices", 80, breaches=15),
        CellPlan("lost_stolen", "printed_records", 37, breaches=0),
        CellPlan("lost_stolen", "portable_storage", 10, breaches=0),
        CellPlan("lost_stolen", "server", 1, breaches=0),
        CellPlan("lost_stolen", "", 28, breaches=0),
    )
    return FixtureProfile(
        name="default",
        us_smbs=30,
        foreign_smbs=10,
        us_nonmatching=200,
        foreign_incidents=100,
        duplicate_ids=5,
        cells=cells,
        unassigned=59,
    )


def small_profile() -> FixtureProfile:
    """Tiny fixture: 20 SMBs (12 US), 100 incidents (60 US), 22 matched."""
    cells = (
        CellPlan("phishing", "email", 2, breaches=1),
        CellPlan("credential", "server", 5, breaches=2),
        CellPlan("credential", "email", 1, breaches=0),
        CellPlan("credential", "", 2, breaches=1),
        CellPlan("insider", "printed_records", 4, breaches=1),
        CellPlan("insider", "server", 2, breaches=1),
        CellPlan("insider", "", 1, breaches=0),
        CellPlan("lost_stolen", "user_devices", 3, breaches=0),
        CellPlan("lost_stolen", "portable_storage", 1, breaches=0),
    )
    return FixtureProfile(
        name="small",
        us_smbs=12,
        foreign_smbs=8,
        us_nonmatching=35,
        foreign_incidents=40,
        duplicate_ids=3,
        cells=cells,
        unassigned=1,
    )


PROFILES = {"default": default_profile, "small": small_profile}

_NAME_ROOTS = (
    "Granite Peak Logistics", "Bluewater Dental Group", "Copperline Machining",
    "Harborview Accounting", "Summit Trail Outfitters", "Redbud Family Pharmacy",
    "Ironwood Cabinetry", "Lakeshore Title Services", "Foxglove Veterinary Clinic",
    "Meridian Payroll Systems", "Oakhurst Realty Partners", "Pinefield Insurance Agency",
    "Quarry Street Printing", "Riverbend Catering", "Sandpiper Travel Bureau",
    "Timberline Electrical", "Union Mill Bakery", "Valleygate Plumbing",
    "Willowbrook Staffing", "Yellowstone Auto Glass", "Anchor Bay Seafood",
    "Birchwood Architects", "Cloverfield Daycare", "Driftwood Interiors",
    "Elm Street Optical", "Fairweather Roofing", "Goldleaf Jewelers",
    "Hazelton Orthodontics", "Ivybridge Tutoring", "Juniper Hills Landscaping",
)

_FOREIGN_ROOTS = (
    "Maple Crown Imports", "Thistledown Textiles", "Northlake Fisheries",
    "Kensington Rail Supply", "Alpenrose Chocolates", "Harbourfront Shipping",
    "Glenmoor Distillery", "Seabright Software", "Tundra Freight Lines",
    "Westmoor Ceramics",
)

_NONMATCH_ROOTS = (
    "Zenith Rail Partners", "Quartz Harbor Analytics", "Vantage Peak Holdings",
    "Nimbus Trade Collective", "Orchid Lane Studios", "Pelican Cove Marina",
    "Stonegate Forge", "Lanternfish Media", "Cobalt Ridge Mining",
    "Amberfield Organics", "Brightwater Kayaks", "Crescent Moon Tea",
    "Dovetail Joinery", "Eastgate Scrap Metal", "Fernhollow Apiary",
    "Galehouse Storage", "Hollyvale Florists", "Ironclad Fencing",
    "Jadeport Trading", "Kestrel Point Aviation",
)

_US_COUNTRIES = ("United States", "USA", "United States of America")
_FOREIGN_COUNTRIES = ("Canada", "United Kingdom", "Germany", "Australia")
_FOREIGN_CODES = ("CAN", "GBR", "DEU", "AUS")
_SUFFIX_VARIANTS = (" Inc", " LLC", ", Ltd.", " Co.", "")

_CAUSE_VARIANTS = {
    "server": ("Server", "Network Server"),
    "email": ("E-mail", "Email"),
    "website": ("Website", "Web Application"),
    "printed_records": ("Printed Records", "Paper Documents"),
    "user_devices": ("Laptop/Desktop", "User Devices"),
    "software": ("Software", "Software Application"),
    "portable_storage": ("Portable Data Storage", "USB Drive"),
}

# Descriptions are keyword-bearing for exactly one rule; breach rows append a
# phrase containing "breach" and non-breach rows never contain that word.
_DESCRIPTIONS = {
    "phishing": (
        "Spear phishing email targeted the finance team.",
        "Employee clicked a spoofed email link during tax season.",
    ),
    "credential": (
        "Attackers logged in with stolen credentials overnight.",
        "Brute force attempts preceded use of a compromised password.",
    ),
    "insider": (
        "Insider copied client files before resignation.",
        "Review found insider access outside job duties.",
    ),
    "lost_stolen": (
        "Courier reported a lost laptop during transit.",
        "Office burglary left a stolen device unaccounted for.",
    ),
    UNASSIGNED: (
        "Routine advisory issued to customers after an audit.",
        "Vendor notified the company of a patched vulnerability.",
    ),
}
_NEUTRAL_DESCRIPTIONS = (
    "Incident reported through the standard intake process.",
    "Case opened after an internal review flagged the event.",
)
_BREACH_SUFFIX = " Records were exposed in the resulting data breach."

_CASE_TYPES = {
    "phishing": "Phishing",
    "credential": "Unauthorized Access",
    "insider": "Insider Threat",
    "lost_stolen": "Lost/Stolen Asset",
    UNASSIGNED: "Other",
}


@dataclass(frozen=True)
class FixturePaths:
    smb_csv: Path
    incident_csv: Path
    sidecar_json: Path


def _display_name(root: str, index: int) -> str:
    suffix = _SUFFIX_VARIANTS[index % len(_SUFFIX_VARIANTS)]
    name = f"{root}{suffix}"
    if index % 3 == 1:
        return name.upper()
    return name


def _names(roots: tuple[str, ...], needed: int, tag: str) -> list[str]:
    base = list(roots)
    counter = 1
    while len(base) < needed:
        base.append(f"{tag} Ventures {counter:02d}")
        counter += 1
    return base[:needed]


def _incident_row(mscad_id: str, company: str, country: str, attack: str,
                  asset: str, breach: bool, variant: int) -> dict[str, str]:
    if attack == "insider":
        # Rotate through the three insider branches: case type, actor, keywords.
        path = variant % 3
        if path == 0:
            case_type = _CASE_TYPES["insider"]
            actor = ("External", "")[variant % 2]
            desc = _NEUTRAL_DESCRIPTIONS[variant % 2]
        elif path == 1:
            case_type = "Other"
            actor = "Internal"
            desc = _NEUTRAL_DESCRIPTIONS[variant % 2]
        else:
            case_type = "Other"
            actor = ""
            desc = _DESCRIPTIONS["insider"][variant % 2]
    else:
        # Alternate between the case-type route and the description route.
        if variant % 2 == 0:
            case_type = _CASE_TYPES[attack]
            desc = (
                _NEUTRAL_DESCRIPTIONS[variant % 2]
                if attack != UNASSIGNED
                else _DESCRIPTIONS[UNASSIGNED][variant % 2]
            )
        else:
            case_type = "Other" if attack != UNASSIGNED else _CASE_TYPES[UNASSIGNED]
            desc = _DESCRIPTIONS[attack][variant % 2]
        actor = "External" if variant % 4 else ""
        # A blank actor with insider keywords would flip the label; the
        # description pools above are disjoint so this cannot happen.
    if breach:
        desc = desc + _BREACH_SUFFIX
    cause = ""
    if asset:
        variants = _CAUSE_VARIANTS[asset]
        cause = variants[variant % len(variants)]
    return {
        "COMPANY_NAME": company,
        "COUNTRY_CODE": country,
        "MSCAD_ID": mscad_id,
        "CASE_TYPE": case_type,
        "CASE_DESCRIPTION": desc,
        "PRODUCT_SERVICE_INVOLVED": actor,
        "PROXIMATE_CAUSE": cause,
    }


def build_fixture(profile: FixtureProfile, seed: int) -> tuple[
        list[dict[str, str]], list[dict[str, str]], dict]:
    """Build SMB rows, incident rows, and the ground-truth sidecar in memory."""
    stream = RandomStream(seed, 7)
    rng = stream.generator

    us_names = _names(_NAME_ROOTS, profile.us_smbs, "Liberty")
    foreign_names = _names(_FOREIGN_ROOTS, profile.foreign_smbs, "Dominion")

    smb_rows: list[dict[str, str]] = []
    for i, root in enumerate(us_names):
        smb_rows.append({
            "COMPANY NAME": _display_name(root, i),
            "TOTAL EMPLOYEES": str(12 + (i * 37) % 480),
            "HQ COUNTRY": _US_COUNTRIES[i % len(_US_COUNTRIES)],
        })
    for i, root in enumerate(foreign_names):
        smb_rows.append({
            "COMPANY NAME": _display_name(root, i),
            "TOTAL EMPLOYEES": str(15 + (i * 29) % 460),
            "HQ COUNTRY": _FOREIGN_COUNTRIES[i % len(_FOREIGN_COUNTRIES)],
        })

    incidents: list[dict[str, str]] = []
    serial = 0

    def next_id() -> str:
        nonlocal serial
        serial += 1
        return f"MSCAD-{serial:06d}"

    variant = 0
    matched_rows: list[dict[str, str]] = []
    for cell in profile.cells:
        for k in range(cell.count):
            company = _display_name(us_names[variant % len(us_names)], variant + 1)
            matched_rows.append(_incident_row(
                next_id(), company, "USA" if variant % 5 else "US",
                cell.attack, cell.asset, k < cell.breaches, variant,
            ))
            variant += 1
    for _ in range(profile.unassigned):
        company = _display_name(us_names[variant % len(us_names)], variant + 1)
        matched_rows.append(_incident_row(
            next_id(), company, "USA", UNASSIGNED, "", False, variant,
        ))
        variant += 1

    incidents.extend(matched_rows)

    # Duplicate rows reuse an existing MSCAD_ID verbatim; dedup keeps one copy
    # whatever the shuffle order, so ground truth is order-independent.
    for i in range(profile.duplicate_ids):
        incidents.append(dict(matched_rows[i * 7 % len(matched_rows)]))

    nonmatch_names = _names(_NONMATCH_ROOTS, max(profile.us_nonmatching, 1), "Outland")
    for i in range(profile.us_nonmatching):
        attack = ("credential", "phishing", UNASSIGNED, "lost_stolen")[i % 4]
        incidents.append(_incident_row(
            next_id(), _display_name(nonmatch_names[i % len(nonmatch_names)], i),
            "USA", attack, "", False, i,
        ))
    for i in range(profile.foreign_incidents):
        # Foreign incidents reuse matched SMB names: the country gate alone
        # must exclude them.
        company = _display_name(us_names[i % len(us_names)], i)
        incidents.append(_incident_row(
            next_id(), company, _FOREIGN_CODES[i % len(_FOREIGN_CODES)],
            "insider" if i % 3 == 0 else "credential", "", False, i,
        ))

    order = rng.permutation(len(incidents))
    incidents = [incidents[i] for i in order]
    rng.shuffle(smb_rows)

    attack_totals: dict[str, int] = {a: 0 for a in
                                     ("insider", "credential", "phishing", "lost_stolen")}
    asset_counts: dict[str, dict[str, int]] = {}
    dropped: dict[str, int] = {}
    breach_assets: dict[str, int] = {}
    breach_unmapped = 0
    for cell in profile.cells:
        attack_totals[cell.attack] += cell.count
        bucket = asset_counts.setdefault(cell.attack, {})
        dropped.setdefault(cell.attack, 0)
        if cell.asset:
            bucket[cell.asset] = bucket.get(cell.asset, 0) + cell.count
            breach_assets[cell.asset] = breach_assets.get(cell.asset, 0) + cell.breaches
        else:
            dropped[cell.attack] += cell.count
            breach_unmapped += cell.breaches
    breach_assets = {a: n for a, n in breach_assets.items() if n > 0}
    breach_total = sum(breach_assets.values()) + breach_unmapped

    counts_for_priors = dict(attack_totals)
    priors = attack_priors(counts_for_priors, profile.matched_total)

    sidecar = {
        "profile": profile.name,
        "seed": seed,
        "filter": {
            "smbs_total": profile.us_smbs + profile.foreign_smbs,
            "smbs_us": profile.us_smbs,
            "incidents_total": len(incidents),
            "incidents_us": profile.matched_total + profile.duplicate_ids
                            + profile.us_nonmatching,
            "matched_raw": profile.matched_total + profile.duplicate_ids,
            "duplicates_removed": profile.duplicate_ids,
            "matched": profile.matched_total,
        },
        "attacks": {**attack_totals, UNASSIGNED: profile.unassigned},
        "priors": priors,
        "conditionals": {
            attack: {
                "total_mapped": sum(asset_counts.get(attack, {}).values()),
                "dropped": dropped.get(attack, 0),
                "assets": dict(sorted(asset_counts.get(attack, {}).items())),
            }
            for attack in sorted(attack_totals)
        },
        "breach": {
            "total": breach_total,
            "unmapped": breach_unmapped,
            "leak": breach_unmapped / breach_total if breach_total else 0.0,
            "assets": dict(sorted(breach_assets.items())),
        },
    }
    return smb_rows, incidents, sidecar


def _write_csv(path: Path, columns: tuple[str, ...], rows: list[dict[str, str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), quoting=csv.QUOTE_ALL)
        writer.writeheader()
        writer.writerows(rows)


def generate_fixture(out_dir: str | Path, seed: int = 7,
                     profile: FixtureProfile | None = None) -> FixturePaths:
    """Write smb_list.csv, incidents.csv, and ground_truth.json under out_dir."""
    if profile is None:
        profile = default_profile()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    smb_rows, incident_rows, sidecar = build_fixture(profile, seed)
    paths = FixturePaths(
        smb_csv=out / "smb_list.csv",
        incident_csv=out / "incidents.csv",
        sidecar_json=out / "ground_truth.json",
    )
    _write_csv(paths.smb_csv, SMB_COLUMNS, smb_rows)
    _write_csv(paths.incident_csv, INCIDENT_COLUMNS, incident_rows)
    with open(paths.sidecar_json, "w", encoding="utf-8") as handle:
        json.dump(sidecar, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return paths
