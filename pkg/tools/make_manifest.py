"""Generate src/ztrisk/data/zt_manifest.json.

Every number below is transcribed from the published model description; the
`source` tag on each entry names the published table or figure each value came from so the
loader's provenance checks and the acceptance suite can trace each value.

Run from the repository root:

    python3 tools/make_manifest.py
"""

from __future__ import annotations

import json
from pathlib import Path

from scipy.special import betaincinv

OUT = Path(__file__).resolve().parent.parent / "src" / "ztrisk" / "data" / "zt_manifest.json"

SCHEMA = "ztrisk.manifest/1"
SEED = 20_240_501
DRAWS = 20_000


def beta_median(alpha: float, beta: float) -> float:
    return round(float(betaincinv(alpha, beta, 0.5)), 6)


def node(id_, group, kind, **extra):
    doc = {"id": id_, "group": group, "kind": kind}
    doc.update(extra)
    return doc


def link(child, parent, role, median, prior, source):
    return {
        "child": child,
        "parent": parent,
        "role": role,
        "median": median,
        "prior": None if prior is None else {"alpha": prior[0], "beta": prior[1]},
        "source": source,
    }


def leak_fixed(value, source):
    return {"kind": "fixed", "value": value, "source": source}


def leak_beta(alpha, beta, median, source):
    return {"kind": "beta", "alpha": alpha, "beta": beta, "median": median,
            "source": source}


def leak_calibrated(target, source):
    return {"kind": "calibrated", "target": target, "source": source}


# ---------------------------------------------------------------- ISM nodes

BARRIER_ROOTS = [
    # id, label, marginal, (alpha, beta)
    ("LimitedBudget", "Limited Cybersecurity Budgets", 0.3207, (161, 341)),
    ("ZTCosts", "ZT Costs", 0.66, (21.1, 10.9)),
    ("PoorZTBudgetEst", "Poor ZT Budget Estimation", 0.46, (47, 52)),
    ("ResistanceToChange", "Resistance to Change", 0.24, (121, 381)),
    ("CybersecurityAwareness", "Cybersecurity Awareness Level", 0.14, (71, 431)),
    ("NoHiring", "No Hiring a Security Analyst", 0.68, (34, 16)),
    ("ZTTechKnowledge", "ZT Tech Knowledge Level", 0.11, (56, 446)),
    ("LegacySystems", "Legacy Systems Substitution", 0.49, (50, 52)),
]

MEASURES = [
    ("DE", "Data Encryption", 0.30, (15, 35)),
    ("DLP", "Data Loss Prevention", 0.15, (7.5, 42.5)),
    ("SSO", "Single Sign-On", 0.20, (2, 8)),
    ("RBAC", "Role-Based Access Control", 0.51, (10.2, 9.8)),
    ("MFA", "Multi-Factor Authentication", 0.35, (11.5, 20.5)),
    ("DM", "Device Management", 0.17, (8.5, 41.5)),
    ("DInv", "Device Inventory", 0.45, (22.5, 27.5)),
    ("EDR", "Endpoint Detection & Response", 0.40, (20, 30)),
    ("WAF", "Web Application Firewall", 0.20, (10, 40)),
]

PILLAR_MEASURES = {
    "DataPillar": [("DE", 0.717387, (25, 10)), ("DLP", 0.426782, (15, 20))],
    "IdentityPillar": [("SSO", 0.397125, (12, 18)), ("RBAC", 0.671908, (20, 10)),
                       ("MFA", 0.783767, (28, 8))],
    "DevicePillar": [("DM", 0.426138, (15, 20)), ("DInv", 0.601829, (18, 12)),
                     ("EDR", 0.738279, (22, 8))],
    "ApplicationPillar": [("WAF", 0.372517, (15, 25))],
}

PILLAR_LABELS = {
    "DataPillar": "Data Pillar",
    "IdentityPillar": "Identity Pillar",
    "DevicePillar": "Device Pillar",
    "ApplicationPillar": "Application Pillar",
}

# Pillar -> ZTSMBsPillars link strengths: the text assigns the Beta priors and
# the point estimates are their medians.
PILLAR_AGG_PRIORS = {
    "DataPillar": (8, 8),
    "IdentityPillar": (12, 8),
    "DevicePillar": (10, 10),
    "ApplicationPillar": (6, 10),
}

FB_LINKS = [
    ("LimitedBudget", 0.7069, (14, 6)),
    ("ZTCosts", 0.6577, (6.5, 3.5)),
    ("PoorZTBudgetEst", 0.1791, (2, 8)),
]

AP_LINKS = [
    ("CybersecurityAwareness", 0.3388, (3.5, 6.5)),
    ("ZTTechKnowledge", 0.2334, (2.5, 7.5)),
]

# NoHiring's Beta is (6, 4): the summary statistics printed for that link
# (mean 0.6003, sd 0.1478, median 0.6074) are those of Beta(6, 4), while the
# narrative text says Beta(6, 5); the statistics win.
OB_LINKS = [
    ("AnalysisParalysis", 0.6048, (7.2, 4.8)),
    ("NoHiring", 0.6074, (6, 4)),
    ("ResistanceToChange", 0.4554, (5.5, 6.5)),
    ("LegacySystems", 0.3902, (4, 6)),
]

SUCCESS_LINKS = [
    ("ZTSMBsPillars", 0.6039, (12, 8)),
    ("NotFinancialBarriers", 0.3960, (6.4, 9.6)),
    ("NotOrganizationalBarriers", 0.4476, (7.2, 8.8)),
]

# ---------------------------------------------------------------- RAM nodes

ATTACKS = [
    ("Phishing", "Phishing & Social Engineering", 0.0329),
    ("CredentialBased", "Credential-Based Attacks", 0.3430),
    ("InsiderThreat", "Insider Threats", 0.4792),
    ("LostStolen", "Physically Lost or Stolen Assets", 0.1054),
]

ZTC_MEASURES = {
    "ZTC1": (["DE", "DLP"], 0.403433),
    "ZTC2": (["DM", "DInv", "EDR"], 0.728345),
    "ZTC3": (["SSO", "RBAC", "MFA"], 0.754354),
    "ZTC4": (["WAF"], 0.195665),
}

ZTC_LABELS = {
    "ZTC1": "ZTC1 (Data Controls)",
    "ZTC2": "ZTC2 (Device Controls)",
    "ZTC3": "ZTC3 (Identity Controls)",
    "ZTC4": "ZTC4 (Application Controls)",
}

ASSETS = [
    ("Email", "Email", 0.73),
    ("Server", "Server", 0.93),
    ("Website", "Website", 0.78),
    ("PrintedRecords", "Printed Records", 0.61),
    ("Software", "Software", 0.54),
    ("UserDevices", "User Devices", 0.91),
    ("PortableStorage", "Portable Data Storage Instruments", 0.76),
]

# attack, asset, attack->intermediate strength (attack-asset conditional),
# ZTC inhibitor links [(ztc, median, source)], intermediate->asset median,
# intermediate->asset Beta prior.
INTERMEDIATES = [
    ("Phishing", "Email", 0.934783,
     [("ZTC2", 0.5359, "tableA3"), ("ZTC3", 0.6233, "tableA3")], 0.9267, (9, 1)),
    ("Phishing", "Server", 0.065217,
     [("ZTC1", 0.3116, "tableA3"), ("ZTC3", 0.4717, "tableA3")], 0.8198, (8, 2)),
    ("InsiderThreat", "Email", 0.071713,
     [("ZTC2", 0.3863, "tableA4"), ("ZTC3", 0.4735, "tableA4")], 0.7147, (7, 3)),
    ("InsiderThreat", "Server", 0.272908,
     [("ZTC1", 0.2303, "tableA4"), ("ZTC3", 0.4729, "tableA4")], 0.7119, (7, 3)),
    ("InsiderThreat", "Website", 0.039841,
     [("ZTC1", 0.2311, "tableA4"), ("ZTC3", 0.4697, "tableA4")], 0.7151, (7, 3)),
    ("InsiderThreat", "PrintedRecords", 0.579681,
     [("ZTC3", 0.2427, "tableA4")], 0.5002, (5, 5)),
    ("InsiderThreat", "UserDevices", 0.009960,
     [("ZTC1", 0.2310, "tableA4"), ("ZTC2", 0.4591, "tableA4"),
      ("ZTC3", 0.4738, "tableA4")], 0.7132, (7, 3)),
    ("InsiderThreat", "Software", 0.003984,
     [("ZTC3", 0.4718, "tableA4"), ("ZTC4", 0.1117, "tableA4")], 0.6071, (6, 4)),
    ("InsiderThreat", "PortableStorage", 0.021912,
     [("ZTC1", 0.1904, "tableA4")], 0.7122, (7, 3)),
    ("CredentialBased", "Email", 0.060127,
     [("ZTC2", 0.5344, "tableA6"), ("ZTC3", 0.6214, "tableA6")], 0.9265, (9, 1)),
    ("CredentialBased", "Server", 0.844937,
     [("ZTC1", 0.2309, "tableA6"), ("ZTC3", 0.5486, "tableA6")], 0.9259, (9, 1)),
    ("CredentialBased", "Website", 0.069620,
     [("ZTC1", 0.2311, "tableA6"), ("ZTC3", 0.5480, "tableA6")], 0.8215, (8, 2)),
    ("CredentialBased", "PrintedRecords", 0.006329,
     [("ZTC3", 0.6188, "tableA6")], 0.6061, (6, 4)),
    ("CredentialBased", "UserDevices", 0.015823,
     [("ZTC1", 0.2304, "tableA6"), ("ZTC2", 0.5340, "tableA6"),
      ("ZTC3", 0.6207, "tableA6")], 0.8200, (8, 2)),
    ("CredentialBased", "PortableStorage", 0.003165,
     [("ZTC1", 0.1900, "tableA6")], 0.8211, (8, 2)),
    ("LostStolen", "Server", 0.007813,
     [("ZTC1", 0.1905, "tableA5"), ("ZTC3", 0.6216, "tableA5")], 0.6099, (6, 4)),
    ("LostStolen", "PrintedRecords", 0.289063,
     [("ZTC3", 0.2449, "tableA5")], 0.7132, (7, 3)),
    ("LostStolen", "UserDevices", 0.625,
     [("ZTC1", 0.2305, "tableA5"), ("ZTC2", 0.6064, "tableA5"),
      ("ZTC3", 0.3196, "tableA5")], 0.8203, (8, 2)),
    ("LostStolen", "PortableStorage", 0.078125,
     [("ZTC1", 0.1910, "tableA5")], 0.8194, (8, 2)),
]

BREACH_STRENGTHS = [
    ("Server", 0.6174),
    ("Email", 0.0957),
    ("Website", 0.0487),
    ("PrintedRecords", 0.1774),
    ("UserDevices", 0.0435),
    ("PortableStorage", 0.0174),
    ("Software", 0.0),
]

RISK_LINKS = [
    ("DataBreach", 0.809223, (16, 4), "table18"),
    # The success link is published for the positive state; the network wires
    # the negated dummy, so the strength and prior are complemented.
    ("NotZTImplementationSuccess", 0.285824, (7, 17), "table18-complement"),
]


def build_nodes_and_links():
    nodes, links = [], []

    for nid, label, marginal, prior in BARRIER_ROOTS:
        nodes.append(node(nid, "barrier_root", "root", label=label,
                          marginal=marginal,
                          prior={"alpha": prior[0], "beta": prior[1]},
                          source="table4"))
    for nid, label, marginal, prior in MEASURES:
        nodes.append(node(nid, "measure", "root", label=label, marginal=marginal,
                          prior={"alpha": prior[0], "beta": prior[1]},
                          source="table5"))

    nodes.append(node("AnalysisParalysis", "barrier", "noisy_or",
                      label="Analysis Paralysis",
                      leak=leak_calibrated(None, "uncalibrated-default"),
                      source="table7"))
    for parent, median, prior in AP_LINKS:
        links.append(link("AnalysisParalysis", parent, "enabler", median, prior,
                          "table7"))

    nodes.append(node("FinancialBarriers", "barrier", "noisy_or",
                      label="Financial Barriers",
                      leak=leak_beta(1, 24, 0.0284, "table6"), source="table6"))
    for parent, median, prior in FB_LINKS:
        links.append(link("FinancialBarriers", parent, "enabler", median, prior,
                          "table6"))

    nodes.append(node("OrganizationalBarriers", "barrier", "noisy_or",
                      label="Organizational Barriers",
                      leak=leak_beta(2, 23, 0.0692, "table7"), source="table7"))
    for parent, median, prior in OB_LINKS:
        links.append(link("OrganizationalBarriers", parent, "enabler", median,
                          prior, "table7"))

    for pillar, measure_links in PILLAR_MEASURES.items():
        nodes.append(node(pillar, "pillar", "noisy_or", label=PILLAR_LABELS[pillar],
                          leak=leak_beta(2, 48, beta_median(2, 48), "model-description"),
                          source="table9"))
        for parent, median, prior in measure_links:
            links.append(link(pillar, parent, "enabler", median, prior, "table9"))

    nodes.append(node("ZTSMBsPillars", "aggregate", "noisy_or",
                      label="ZT SMBs Pillars",
                      leak=leak_calibrated(0.68, "table20"), source="model-description"))
    for pillar, prior in PILLAR_AGG_PRIORS.items():
        links.append(link("ZTSMBsPillars", pillar, "enabler",
                          beta_median(*prior), prior, "model-description"))

    nodes.append(node("NotFinancialBarriers", "dummy", "negation",
                      label="Not(Financial Barriers)", parent="FinancialBarriers",
                      source="figure6"))
    nodes.append(node("NotOrganizationalBarriers", "dummy", "negation",
                      label="Not(Organizational Barriers)",
                      parent="OrganizationalBarriers", source="figure6"))

    nodes.append(node("ZTImplementationSuccess", "success", "noisy_or",
                      label="ZT Implementation Success Chance",
                      leak=leak_calibrated(0.651, "figure5"),
                      source="table12"))
    for parent, median, prior in SUCCESS_LINKS:
        links.append(link("ZTImplementationSuccess", parent, "enabler", median,
                          prior, "table12"))

    for nid, label, marginal in ATTACKS:
        nodes.append(node(nid, "attack", "root", label=label, marginal=marginal,
                          prior=None, source="table13"))

    for ztc, (measures, median) in ZTC_MEASURES.items():
        nodes.append(node(ztc, "ztc", "noisy_or", label=ZTC_LABELS[ztc],
                          leak=leak_fixed(0.0, "table15"), source="table15"))
        for measure in measures:
            links.append(link(ztc, measure, "enabler", median, None, "table15"))

    for attack, asset, cond, inhibitors, *_ in INTERMEDIATES:
        inter = f"Cause_{attack}_{asset}"
        nodes.append(node(inter, "intermediate", "noisy_or",
                          label=f"{attack} on {asset}",
                          leak=leak_fixed(0.0, "table14"), source="table14"))
        links.append(link(inter, attack, "enabler", cond, None, "table14"))
        for ztc, median, source in inhibitors:
            links.append(link(inter, ztc, "inhibitor", median, None, source))

    for nid, label, target in ASSETS:
        nodes.append(node(nid, "asset", "noisy_or", label=label,
                          leak=leak_calibrated(target, "table21"),
                          source="table16"))
    for attack, asset, _cond, _inh, median, prior in INTERMEDIATES:
        links.append(link(asset, f"Cause_{attack}_{asset}", "enabler", median,
                          prior, "table16"))

    nodes.append(node("DataBreach", "breach", "noisy_or", label="Data Breach",
                      leak=leak_fixed(84 / 659, "table17"), source="table17"))
    for asset, strength in BREACH_STRENGTHS:
        links.append(link("DataBreach", asset, "enabler", strength, None,
                          "table17"))

    nodes.append(node("NotZTImplementationSuccess", "dummy", "negation",
                      label="Not(ZT Implementation Success)",
                      parent="ZTImplementationSuccess", source="figure6"))

    nodes.append(node("RiskMagnitude", "risk", "noisy_or", label="Risk Magnitude",
                      leak=leak_calibrated(0.63, "figure5"),
                      source="table18"))
    for parent, median, prior, source in RISK_LINKS:
        links.append(link("RiskMagnitude", parent, "enabler", median, prior,
                          source))

    return nodes, links


def build_reference_values():
    refs = [
        {"id": "financial_barriers_base", "node": "FinancialBarriers",
         "published_value": 0.61, "tolerance": 0.01, "source": "figure5"},
        {"id": "organizational_barriers_base", "node": "OrganizationalBarriers",
         "published_value": 0.63, "tolerance": 0.02, "source": "figure5"},
        {"id": "zt_pillars_base", "node": "ZTSMBsPillars", "published_value": 0.68,
         "tolerance": 0.005, "source": "table20", "calibrates": "ZTSMBsPillars"},
        {"id": "success_base", "node": "ZTImplementationSuccess",
         "published_value": 0.651, "tolerance": 0.005, "source": "figure5",
         "calibrates": "ZTImplementationSuccess"},
        {"id": "risk_base", "node": "RiskMagnitude", "published_value": 0.63,
         "tolerance": 0.01, "source": "figure5",
         "calibrates": "RiskMagnitude"},
        {"id": "data_breach_base", "node": "DataBreach", "published_value": 0.71,
         "tolerance": 0.01, "source": "figure6"},
        {"id": "data_pillar_base", "node": "DataPillar", "published_value": 0.29,
         "tolerance": 0.01, "source": "table20"},
        {"id": "identity_pillar_base", "node": "IdentityPillar",
         "published_value": 0.35, "tolerance": 0.01, "source": "table20"},
        {"id": "device_pillar_base", "node": "DevicePillar", "published_value": 0.54,
         "tolerance": 0.01, "source": "table20"},
        {"id": "application_pillar_base", "node": "ApplicationPillar",
         "published_value": 0.11, "tolerance": 0.01, "source": "table20"},
        {"id": "table10_data_predictive", "node": "DataPillar",
         "published_value": 0.6166, "tolerance": 0.01, "source": "table10"},
        {"id": "table10_identity_predictive", "node": "IdentityPillar",
         "published_value": 0.8257, "tolerance": 0.01, "source": "table10"},
        {"id": "table10_device_predictive", "node": "DevicePillar",
         "published_value": 0.7704, "tolerance": 0.01, "source": "table10"},
        {"id": "table10_application_predictive", "node": "ApplicationPillar",
         "published_value": 0.1711, "tolerance": 0.01, "source": "table10"},
    ]
    for nid, _label, target in ASSETS:
        refs.append({
            "id": f"{nid.lower()}_base", "node": nid, "published_value": target,
            "tolerance": 0.01, "source": "table21", "calibrates": nid,
        })
    return refs


def ref_cell(value, arrow=None):
    return {"value": value, "arrow": arrow}


def build_presets():
    table19_watch = ["FinancialBarriers", "OrganizationalBarriers",
                     "ZTImplementationSuccess", "RiskMagnitude"]
    table19_rows = [
        {"row": 0, "label": "Base", "evidence": [],
         "reference": {"FinancialBarriers": ref_cell(0.61),
                       "OrganizationalBarriers": ref_cell(0.63),
                       "ZTImplementationSuccess": ref_cell(0.65),
                       "RiskMagnitude": ref_cell(0.63)}},
        {"row": 1, "label": "Scenario 1",
         "evidence": ["LimitedBudget", "ZTCosts"],
         "reference": {"FinancialBarriers": ref_cell(0.91, "up"),
                       "OrganizationalBarriers": ref_cell(0.63),
                       "ZTImplementationSuccess": ref_cell(0.57, "down"),
                       "RiskMagnitude": ref_cell(0.64, "up")}},
        {"row": 2, "label": "Scenario 2",
         "evidence": ["LimitedBudget", "ZTCosts", "AnalysisParalysis"],
         "reference": {"FinancialBarriers": ref_cell(0.91),
                       "OrganizationalBarriers": ref_cell(0.84, "up"),
                       "ZTImplementationSuccess": ref_cell(0.49, "down"),
                       "RiskMagnitude": ref_cell(0.65, "up")}},
        {"row": 3, "label": "Scenario 3",
         "evidence": ["LimitedBudget", "ZTCosts", "AnalysisParalysis", "NoHiring"],
         "reference": {"FinancialBarriers": ref_cell(0.91),
                       "OrganizationalBarriers": ref_cell(0.90, "up"),
                       "ZTImplementationSuccess": ref_cell(0.49),
                       "RiskMagnitude": ref_cell(0.65)}},
        {"row": 4, "label": "Scenario 4",
         "evidence": ["LimitedBudget", "ZTCosts", "AnalysisParalysis", "NoHiring",
                      "ResistanceToChange"],
         "reference": {"FinancialBarriers": ref_cell(0.91),
                       "OrganizationalBarriers": ref_cell(0.94, "up"),
                       "ZTImplementationSuccess": ref_cell(0.48, "down"),
                       "RiskMagnitude": ref_cell(0.65)}},
        {"row": 5, "label": "Scenario 5",
         "evidence": ["LimitedBudget", "ZTCosts", "AnalysisParalysis", "NoHiring",
                      "ResistanceToChange", "LegacySystems"],
         "reference": {"FinancialBarriers": ref_cell(0.91),
                       "OrganizationalBarriers": ref_cell(0.95, "up"),
                       "ZTImplementationSuccess": ref_cell(0.47, "down"),
                       "RiskMagnitude": ref_cell(0.65)}},
    ]

    table20_watch = ["IdentityPillar", "DevicePillar", "DataPillar",
                     "ApplicationPillar", "ZTSMBsPillars",
                     "ZTImplementationSuccess", "RiskMagnitude"]
    table20_rows = [
        {"row": 0, "label": "Base", "evidence": [],
         "reference": {"IdentityPillar": ref_cell(0.35),
                       "DevicePillar": ref_cell(0.54),
                       "DataPillar": ref_cell(0.29),
                       "ApplicationPillar": ref_cell(0.11),
                       "ZTSMBsPillars": ref_cell(0.68),
                       "ZTImplementationSuccess": ref_cell(0.65),
                       "RiskMagnitude": ref_cell(0.63)}},
        {"row": 1, "label": "Scenario 1", "evidence": ["MFA", "SSO", "RBAC"],
         "reference": {"IdentityPillar": ref_cell(0.80, "up"),
                       "DevicePillar": ref_cell(0.54),
                       "DataPillar": ref_cell(0.29),
                       "ApplicationPillar": ref_cell(0.11),
                       "ZTSMBsPillars": ref_cell(0.84, "up"),
                       "ZTImplementationSuccess": ref_cell(0.71, "up"),
                       "RiskMagnitude": ref_cell(0.59, "down")}},
        {"row": 2, "label": "Scenario 2",
         "evidence": ["MFA", "SSO", "RBAC", "DM", "DInv", "EDR"],
         "reference": {"IdentityPillar": ref_cell(0.80),
                       "DevicePillar": ref_cell(0.94, "up"),
                       "DataPillar": ref_cell(0.29),
                       "ApplicationPillar": ref_cell(0.11),
                       "ZTSMBsPillars": ref_cell(0.93, "up"),
                       "ZTImplementationSuccess": ref_cell(0.74, "up"),
                       "RiskMagnitude": ref_cell(0.58, "down")}},
        {"row": 3, "label": "Scenario 3",
         "evidence": ["MFA", "SSO", "RBAC", "DM", "DInv", "EDR", "DE", "DLP"],
         "reference": {"IdentityPillar": ref_cell(0.80),
                       "DevicePillar": ref_cell(0.94),
                       "DataPillar": ref_cell(0.84, "up"),
                       "ApplicationPillar": ref_cell(0.11),
                       "ZTSMBsPillars": ref_cell(0.96, "up"),
                       "ZTImplementationSuccess": ref_cell(0.75, "up"),
                       "RiskMagnitude": ref_cell(0.49, "down")}},
        {"row": 4, "label": "Scenario 4",
         "evidence": ["MFA", "SSO", "RBAC", "DM", "DInv", "EDR", "DE", "DLP",
                      "WAF"],
         "reference": {"IdentityPillar": ref_cell(0.80),
                       "DevicePillar": ref_cell(0.94),
                       "DataPillar": ref_cell(0.84),
                       "ApplicationPillar": ref_cell(0.39, "up"),
                       "ZTSMBsPillars": ref_cell(0.96),
                       "ZTImplementationSuccess": ref_cell(0.75),
                       "RiskMagnitude": ref_cell(0.49)}},
    ]

    table21_watch = ["Email", "Server", "Website", "PrintedRecords", "Software",
                     "UserDevices", "PortableStorage", "DataBreach",
                     "RiskMagnitude"]
    table21_rows = [
        {"row": 0, "label": "Base", "evidence": [],
         "reference": {"Email": ref_cell(0.73), "Server": ref_cell(0.93),
                       "Website": ref_cell(0.78),
                       "PrintedRecords": ref_cell(0.61),
                       "Software": ref_cell(0.54),
                       "UserDevices": ref_cell(0.91),
                       "PortableStorage": ref_cell(0.76),
                       "DataBreach": ref_cell(0.71),
                       "RiskMagnitude": ref_cell(0.63)}},
        {"row": 1, "label": "Scenario 1", "evidence": ["ZTC1"],
         "reference": {"Email": ref_cell(0.73), "Server": ref_cell(0.74, "down"),
                       "Website": ref_cell(0.46, "down"),
                       "PrintedRecords": ref_cell(0.61),
                       "Software": ref_cell(0.54),
                       "UserDevices": ref_cell(0.73, "down"),
                       "PortableStorage": ref_cell(0.13, "down"),
                       "DataBreach": ref_cell(0.62, "down"),
                       "RiskMagnitude": ref_cell(0.56, "down")}},
        {"row": 2, "label": "Scenario 2", "evidence": ["ZTC1", "ZTC2"],
         "reference": {"Email": ref_cell(0.57, "down"),
                       "Server": ref_cell(0.74),
                       "Website": ref_cell(0.46),
                       "PrintedRecords": ref_cell(0.61),
                       "Software": ref_cell(0.54),
                       "UserDevices": ref_cell(0.60, "down"),
                       "PortableStorage": ref_cell(0.13),
                       "DataBreach": ref_cell(0.61, "down"),
                       "RiskMagnitude": ref_cell(0.55, "down")}},
        {"row": 3, "label": "Scenario 3", "evidence": ["ZTC1", "ZTC2", "ZTC3"],
         "reference": {"Email": ref_cell(0.18, "down"),
                       "Server": ref_cell(0.42, "down"),
                       "Website": ref_cell(0.11, "down"),
                       "PrintedRecords": ref_cell(0.23, "down"),
                       "Software": ref_cell(0.50, "down"),
                       "UserDevices": ref_cell(0.16, "down"),
                       "PortableStorage": ref_cell(0.13),
                       "DataBreach": ref_cell(0.40, "down"),
                       "RiskMagnitude": ref_cell(0.40, "down")}},
        {"row": 4, "label": "Scenario 4",
         "evidence": ["ZTC1", "ZTC2", "ZTC3", "ZTC4"],
         "reference": {"Email": ref_cell(0.18), "Server": ref_cell(0.42),
                       "Website": ref_cell(0.11),
                       "PrintedRecords": ref_cell(0.23),
                       "Software": ref_cell(0.06, "down"),
                       "UserDevices": ref_cell(0.16),
                       "PortableStorage": ref_cell(0.13),
                       "DataBreach": ref_cell(0.40),
                       "RiskMagnitude": ref_cell(0.40)}},
    ]

    return [
        {"id": "table19", "kind": "forward", "source": "table19",
         "watch": table19_watch, "rows": table19_rows},
        {"id": "table20", "kind": "forward", "source": "table20",
         "watch": table20_watch, "rows": table20_rows},
        {"id": "table21", "kind": "forward", "source": "table21",
         "watch": table21_watch, "rows": table21_rows},
        {"id": "table22", "kind": "backward", "source": "table22",
         "virtual": {"RiskMagnitude": [0.2, 0.8]},
         "watch": ["ZTImplementationSuccess", "ZTC1", "ZTC2", "ZTC3",
                   "DataBreach", "RiskMagnitude"],
         "reference": {"ZTImplementationSuccess": ref_cell(0.69),
                       "ZTC1": ref_cell(0.266), "ZTC2": ref_cell(0.546),
                       "ZTC3": ref_cell(0.372), "DataBreach": ref_cell(0.509)}},
        {"id": "table23", "kind": "mpe", "source": "table23",
         "evidence": ["DataBreach"]},
    ]


def build_tornado_presets():
    return [
        {"id": "fig8", "target": "FinancialBarriers",
         "candidates": ["LimitedBudget", "ZTCosts", "PoorZTBudgetEst"],
         "expected_order": ["ZTCosts", "LimitedBudget", "PoorZTBudgetEst"],
         "source": "figure8"},
        {"id": "fig9", "target": "OrganizationalBarriers",
         "candidates": ["NoHiring", "ResistanceToChange", "LegacySystems",
                        "CybersecurityAwareness", "ZTTechKnowledge"],
         "expected_first": "NoHiring",
         "reference_range": {"source_id": "NoHiring", "low": 0.612,
                             "high": 0.748, "tolerance": 0.05},
         "source": "figure9"},
        {"id": "fig11", "target": "DataBreach",
         "candidates": ["Phishing", "CredentialBased", "InsiderThreat",
                        "LostStolen"],
         "expected_order": ["CredentialBased", "InsiderThreat", "LostStolen",
                            "Phishing"],
         "source": "figure11"},
    ]


def main() -> None:
    nodes, links = build_nodes_and_links()
    document = {
        "schema": SCHEMA,
        "seed": SEED,
        "draws": DRAWS,
        "nodes": nodes,
        "links": links,
        "reference_values": build_reference_values(),
        "presets": build_presets(),
        "tornado_presets": build_tornado_presets(),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=1)
        handle.write("\n")
    print(f"wrote {OUT} ({len(nodes)} nodes, {len(links)} links)")


if __name__ == "__main__":
    main()
