"""Command-line front end for the risk model.

Every subcommand prints a human-readable table to stdout and, with --out,
writes the same result as a JSON document. Exit codes: 0 on success, 2 for
validation problems (bad arguments, unknown presets or nodes, malformed
input files), 3 when calibration cannot reach a published target.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Any

from .dataprep import (
    DEFAULT_RULES,
    UNASSIGNED,
    asset_conditionals,
    attack_priors,
    breach_strengths,
    classify_attacks,
    count_attacks,
    filter_smb_incidents,
    read_incident_csv,
    read_smb_csv,
    summary_json,
)
from .fixtures import generate_fixture
from .inference import EMPTY_EVIDENCE, InconsistentEvidence, mpe, posterior_marginals
from .montecarlo import (
    mc_spec_from_document,
    mc_spec_to_document,
    propagate_noisy_or,
    render_summary_table,
    summary_to_document,
)
from .network import UnknownNode
from .sensitivity import (
    ParameterRef,
    PerturbationOutOfRange,
    TargetInCandidates,
    bars_to_document,
    evidence_tornado,
    parameter_tornado,
    render_tornado_table,
)
from .ztmodel import (
    Preset,
    SchemaError,
    UnknownPreset,
    ZtManifest,
    calibrate,
    default_manifest_path,
    evidence_from_document,
    evidence_to_document,
    load_manifest,
    manifest_version,
    marginals_to_document,
    mpe_to_document,
    render_calibration_table,
    render_suite_table,
    run_mpe_preset,
    run_scenario_suite,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3

_INFEASIBLE_NOTE = "target below achievable floor"


class CliError(Exception):
    """Validation failure with a shell exit code."""

    def __init__(self, message: str, code: int = EXIT_VALIDATION) -> None:
        super().__init__(message)
        self.code = code


@dataclasses.dataclass(frozen=True)
class LoadedModel:
    manifest: ZtManifest
    version: str


def _load_model(args: argparse.Namespace) -> LoadedModel:
    path = Path(args.manifest) if args.manifest else default_manifest_path()
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    return LoadedModel(manifest=load_manifest(doc), version=manifest_version(doc))


def _resolve_node(manifest: ZtManifest, text: str) -> str:
    """Match a node by id, case-insensitive id, or singleton group name."""
    ids = [decl.id for decl in manifest.nodes]
    if text in ids:
        return text
    folded = [nid for nid in ids if nid.lower() == text.lower()]
    if len(folded) == 1:
        return folded[0]
    in_group = [decl.id for decl in manifest.nodes
                if decl.group.lower() == text.lower()]
    if len(in_group) == 1:
        return in_group[0]
    if in_group:
        raise CliError(f"{text!r} names a group of {len(in_group)} nodes "
                       f"({', '.join(sorted(in_group))}); pick one")
    raise CliError(f"unknown node {text!r}")


def _emit(args: argparse.Namespace, text: str, document: dict[str, Any]) -> None:
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(document, handle, indent=2)
            handle.write("\n")


def _parse_preset_arg(raw: str) -> tuple[str, int | None]:
    if ":" in raw:
        name, _, row_text = raw.partition(":")
        try:
            return name, int(row_text)
        except ValueError:
            raise CliError(f"preset row must be an integer, got {row_text!r}") from None
    return raw, None


def _scenario_presets(manifest: ZtManifest) -> list[str]:
    return sorted(p.id for p in manifest.presets)


def _tornado_presets(manifest: ZtManifest) -> list[str]:
    return sorted(p.id for p in manifest.tornado_presets)


def _parse_param_ref(text: str) -> ParameterRef:
    kind, sep, rest = text.partition(":")
    if not sep:
        raise CliError(f"parameter {text!r} must look like kind:..., e.g. "
                       "strength:Child<-Parent, leak:Node, or marginal:Node")
    if kind == "strength":
        child, sep, parent = rest.partition("<-")
        if not sep or not child or not parent:
            raise CliError(f"strength parameter {text!r} must look like "
                           "strength:Child<-Parent")
        return ParameterRef(kind="strength", child=child, parent=parent)
    if kind in ("leak", "marginal"):
        if not rest:
            raise CliError(f"{kind} parameter {text!r} is missing a node id")
        return ParameterRef(kind=kind, node=rest)
    raise CliError(f"unknown parameter kind {kind!r} in {text!r}")


def cmd_base(args: argparse.Namespace) -> int:
    model = _load_model(args)
    result = calibrate(model.manifest)
    order = [decl.id for decl in model.manifest.nodes]
    marginals = posterior_marginals(result.network, EMPTY_EVIDENCE, order)
    lines = ["node\tgroup\tp_active"]
    for nid in order:
        lines.append(f"{nid}\t{model.manifest.node(nid).group}\t{marginals[nid]:.6f}")
    doc = marginals_to_document(EMPTY_EVIDENCE, marginals)
    doc["model_version"] = model.version
    _emit(args, "\n".join(lines), doc)
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    model = _load_model(args)
    name, row = _parse_preset_arg(args.preset)
    try:
        preset = model.manifest.preset(name)
    except UnknownPreset:
        raise CliError(f"unknown preset {name!r}; valid presets: "
                       f"{', '.join(_scenario_presets(model.manifest))}") from None
    result = calibrate(model.manifest)
    if preset.kind == "mpe":
        mpe_result = run_mpe_preset(result.network, preset)
        evidence = evidence_from_document({nid: "active" for nid in preset.evidence})
        doc = mpe_to_document(evidence, mpe_result)
        doc["model_version"] = model.version
        lines = [f"p(mpe,e)={mpe_result.p_mpe_and_e:.6e}\tp(e)={mpe_result.p_e:.6e}"
                 f"\tp(mpe|e)={mpe_result.p_mpe_given_e:.6f}"]
        for nid, state in sorted(doc["assignment"].items()):
            lines.append(f"{nid}\t{state}")
        _emit(args, "\n".join(lines), doc)
        return EXIT_OK
    suite = run_scenario_suite(result.network, preset)
    doc = suite.to_document()
    doc["model_version"] = model.version
    if row is not None:
        kept = [r for r in doc["rows"] if r["row"] == row]
        if not kept:
            valid = ", ".join(str(r["row"]) for r in doc["rows"])
            raise CliError(f"preset {name!r} has no row {row}; valid rows: {valid}")
        doc["rows"] = kept
        suite = dataclasses.replace(suite, rows=(suite.row(row),))
    _emit(args, render_suite_table(suite), doc)
    return EXIT_OK


def cmd_tornado(args: argparse.Namespace) -> int:
    model = _load_model(args)
    manifest = model.manifest
    candidates: list[str] = []
    if args.preset:
        try:
            tp = manifest.tornado_preset(args.preset)
        except UnknownPreset:
            raise CliError(f"unknown preset {args.preset!r}; valid presets: "
                           f"{', '.join(_tornado_presets(manifest))}") from None
        target = tp.target
        candidates = list(tp.candidates)
    elif args.target:
        target = _resolve_node(manifest, args.target)
        if args.candidates:
            candidates = [_resolve_node(manifest, c) for c in args.candidates]
        else:
            candidates = [decl.id for decl in manifest.nodes
                          if decl.kind == "root" and decl.id != target]
    else:
        raise CliError("tornado needs --preset or --target")

    result = calibrate(manifest)
    if args.mode == "evidence":
        bars = evidence_tornado(result.network, target, candidates)
    else:
        if args.params:
            params = [_parse_param_ref(p) for p in args.params]
        else:
            params = [ParameterRef(kind="strength", child=target, parent=link.parent)
                      for link in manifest.links_for(target)]
            if not params:
                raise CliError(f"node {target!r} has no inbound links to perturb")
        bars = parameter_tornado(result.manifest, target, params, args.r)
    doc = bars_to_document(target, args.mode, bars)
    doc["model_version"] = model.version
    _emit(args, render_tornado_table(bars), doc)
    return EXIT_OK


def cmd_mpe(args: argparse.Namespace) -> int:
    model = _load_model(args)
    with open(args.evidence, encoding="utf-8") as handle:
        raw = json.load(handle)
    known = [decl.id for decl in model.manifest.nodes]
    evidence = evidence_from_document(raw, known=known)
    result = calibrate(model.manifest)
    mpe_result = mpe(result.network, evidence)
    doc = mpe_to_document(evidence, mpe_result)
    doc["model_version"] = model.version
    lines = [f"p(mpe,e)={mpe_result.p_mpe_and_e:.6e}\tp(e)={mpe_result.p_e:.6e}"
             f"\tp(mpe|e)={mpe_result.p_mpe_given_e:.6f}"]
    for nid, state in sorted(doc["assignment"].items()):
        lines.append(f"{nid}\t{state}")
    _emit(args, "\n".join(lines), doc)
    return EXIT_OK


def cmd_backward(args: argparse.Namespace) -> int:
    model = _load_model(args)
    target = _resolve_node(model.manifest, args.target)
    if not 0.0 <= args.virtual <= 1.0:
        raise CliError(f"--virtual must lie in [0, 1], got {args.virtual}")
    result = calibrate(model.manifest)
    watch = tuple(decl.id for decl in model.manifest.nodes)
    preset = Preset(id=f"backward:{target}", kind="backward", watch=watch,
                    virtual={target: (args.virtual, 1.0 - args.virtual)})
    suite = run_scenario_suite(result.network, preset)
    doc = suite.to_document()
    doc["model_version"] = model.version
    _emit(args, render_suite_table(suite), doc)
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    with open(args.spec, encoding="utf-8") as handle:
        raw = json.load(handle)
    spec = mc_spec_from_document(raw)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    summary = propagate_noisy_or(spec, workers=args.workers)
    doc = {
        "schema": "ztrisk.mc/1",
        "seed": spec.seed,
        "spec": mc_spec_to_document(spec),
        "summary": summary_to_document(summary),
    }
    _emit(args, render_summary_table({"result": summary}), doc)
    return EXIT_OK


def cmd_dataprep(args: argparse.Namespace) -> int:
    smbs = read_smb_csv(args.smb)
    incidents = read_incident_csv(args.incidents)
    result = filter_smb_incidents(smbs, incidents)
    assignments = classify_attacks(result.matched)
    counts = count_attacks(assignments)
    labeled = {a: counts.get(a, 0) for a in DEFAULT_RULES.attacks}
    priors = attack_priors(labeled, total=len(result.matched))
    table = asset_conditionals(assignments)
    breaches = breach_strengths(
        [a.record for a in assignments if a.attack != UNASSIGNED])
    doc = {"schema": "ztrisk.dataprep/1",
           **summary_json(result.counts, labeled, priors, table, breaches)}
    lines = [
        "section\tkey\tvalue",
        f"filter\tmatched\t{result.counts.matched}",
        f"filter\tduplicates_removed\t{result.counts.duplicates_removed}",
    ]
    for attack in DEFAULT_RULES.attacks:
        lines.append(f"prior\t{attack}\t{priors[attack]:.4f}")
    for row in table.rows:
        lines.append(f"conditional\t{row.attack}->{row.asset}\t{row.probability:.4f}")
    lines.append(f"breach\tleak\t{breaches.leak:.4f}")
    for row in breaches.rows:
        lines.append(f"breach\t{row.asset}\t{row.strength:.4f}")
    _emit(args, "\n".join(lines), doc)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    model = _load_model(args)
    result = calibrate(model.manifest)
    doc = result.to_document()
    doc["model_version"] = model.version
    _emit(args, render_calibration_table(result.report), doc)
    infeasible = [f.node for f in result.report.fitted_leaks
                  if f.note.startswith(_INFEASIBLE_NOTE)]
    if infeasible:
        print(f"calibration infeasible for: {', '.join(infeasible)}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_fixture(args: argparse.Namespace) -> int:
    paths = generate_fixture(args.out_dir, seed=args.seed)
    doc = {
        "schema": "ztrisk.fixture/1",
        "seed": args.seed,
        "smb_csv": str(paths.smb_csv),
        "incident_csv": str(paths.incident_csv),
        "sidecar_json": str(paths.sidecar_json),
    }
    text = "\n".join([f"smb_csv\t{paths.smb_csv}",
                      f"incident_csv\t{paths.incident_csv}",
                      f"sidecar_json\t{paths.sidecar_json}"])
    _emit(args, text, doc)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(manifest_path=args.manifest)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", metavar="PATH", default=None,
                        help="model manifest JSON (default: packaged model, "
                             "or $ZTRISK_MANIFEST)")
    common.add_argument("--out", metavar="FILE", default=None,
                        help="also write the result as a JSON document")

    parser = argparse.ArgumentParser(
        prog="ztrisk",
        description="Discrete Bayesian risk model of zero-trust adoption "
                    "for small and midsize businesses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("base", parents=[common],
                       help="base-case marginals of the calibrated model")
    p.set_defaults(func=cmd_base)

    p = sub.add_parser("scenario", parents=[common],
                       help="run a published scenario preset")
    p.add_argument("--preset", required=True, metavar="NAME[:ROW]",
                   help="preset id, optionally with a single row index")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("tornado", parents=[common],
                       help="rank drivers of a target's posterior")
    p.add_argument("--preset", default=None, help="published tornado preset id")
    p.add_argument("--target", default=None, help="target node (id or group)")
    p.add_argument("--candidates", nargs="+", default=None,
                   help="candidate source nodes (evidence mode)")
    p.add_argument("--mode", choices=("evidence", "parameter"), default="evidence")
    p.add_argument("--params", nargs="+", default=None, metavar="REF",
                   help="parameter refs like strength:Child<-Parent, leak:Node, "
                        "marginal:Node (parameter mode)")
    p.add_argument("--r", type=float, default=0.1,
                   help="relative perturbation for parameter mode (default 0.1)")
    p.set_defaults(func=cmd_tornado)

    p = sub.add_parser("mpe", parents=[common],
                       help="most probable explanation under hard evidence")
    p.add_argument("--evidence", required=True, metavar="FILE",
                   help="JSON file of {node: 'active' | 'inactive'}")
    p.set_defaults(func=cmd_mpe)

    p = sub.add_parser("backward", parents=[common],
                       help="soft-evidence update on one node")
    p.add_argument("--target", required=True, help="node to apply the update to")
    p.add_argument("--virtual", type=float, required=True, metavar="W",
                   help="likelihood weight for the active state; the inactive "
                        "state gets 1-W")
    p.set_defaults(func=cmd_backward)

    p = sub.add_parser("mc", parents=[common],
                       help="Monte Carlo propagation of a link-uncertainty spec")
    p.add_argument("--spec", required=True, metavar="FILE", help="spec JSON file")
    p.add_argument("--seed", type=int, default=None, help="override the seed in the spec file")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("dataprep", parents=[common],
                       help="derive model parameters from incident CSVs")
    p.add_argument("--smb", required=True, metavar="CSV")
    p.add_argument("--incidents", required=True, metavar="CSV")
    p.set_defaults(func=cmd_dataprep)

    p = sub.add_parser("calibrate", parents=[common],
                       help="fit leak terms and report against published values")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("fixture", parents=[common],
                       help="write synthetic dataprep CSVs with known ground truth")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out-dir", default="ztrisk-fixture", metavar="DIR")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SchemaError, UnknownNode, UnknownPreset, TargetInCandidates,
            PerturbationOutOfRange, InconsistentEvidence,
            json.JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
