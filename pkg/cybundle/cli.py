import argparse
import json
import pathlib
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

from loguru import logger

from . import defaults
from .bundles import (
    PrincipalBundle,
    adjunction_character,
    construct_surjective_bundle,
    obstruction_check,
    rank1_roots,
    rigidity_solve,
    surjectivity_certificate,
)
from .errors import CyBundleError, InputError
from .picard import ManifoldDescriptor, catalog, load_descriptor, validate
from .rm import RmGroup, build_abelian_cy_bundle, character_group, sufficiency_check
from .settings import SolverOptions, load_options
from .state import Verdict
from .toric import Fan, audin_cox_bundle, check_smooth_complete


@dataclass
class Report:
    payload: dict[str, Any]
    text: str
    exit_code: int = 0


def load_json_file(path: str) -> Any:
    try:
        with open(path, "r", encoding="UTF-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise InputError(f"file not found: {path}", {"path": path}) from e
    except json.JSONDecodeError as e:
        raise InputError(
            f"malformed JSON in {path}: {e.msg}",
            {"path": path, "line": e.lineno, "column": e.colno, "position": e.pos},
        ) from e


def _manifold(args) -> ManifoldDescriptor:
    if not args.manifold:
        raise InputError("--manifold is required for this command")
    return load_descriptor(args.manifold)


def _bundle(path: str, base: ManifoldDescriptor | None) -> PrincipalBundle:
    data = load_json_file(path)
    if not isinstance(data, dict):
        raise InputError(f"{path} must contain a JSON object")
    try:
        return PrincipalBundle.from_json(data, base)
    except CyBundleError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"invalid bundle in {path}: {e}", {"path": path}) from e


def cmd_catalog(args, options: SolverOptions) -> Report:
    entries = []
    lines = []
    for m in catalog():
        violations = validate(m)
        entries.append({"descriptor": m.to_json(), "violations": violations})
        lines.append(
            f"{m.name:<14} dim={m.dim} kahler={str(m.kahler).lower():<5} "
            f"NS=Z^{m.ns_free_rank}{'' if m.ns_torsion.is_trivial else ' x ' + str(m.ns_torsion)} "
            f"g={m.g} pi1={m.pi1_ab} K={m.canonical_class}"
        )
    return Report({"catalog": entries}, "\n".join(lines))


def cmd_validate(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    violations = validate(m)
    if violations:
        text = f"{m.name}: {len(violations)} violation(s)\n" + "\n".join(f"  - {v}" for v in violations)
    else:
        text = f"{m.name}: valid"
    return Report({"manifold": m.name, "valid": not violations, "violations": violations}, text, 1 if violations else 0)


def cmd_obstruct(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    b = _bundle(args.bundle, m)
    cy = obstruction_check(b)
    text = f"{b.name} over {m.name}: K_X = {m.canonical_class}\n"
    if cy.solvable:
        text += f"CY structure exists: lambda{cy.particular} = K_X"
    else:
        text += "no CY structure: K_X is not in the image of the character map"
    return Report({"bundle": b.name, "manifold": m.name, "solvable": cy.solvable}, text)


def cmd_cy_structures(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    b = _bundle(args.bundle, m)
    cy = obstruction_check(b)
    payload = {"bundle": b.name, "manifold": m.name, **cy.to_json()}
    if not cy.solvable:
        return Report(payload, f"{b.name} over {m.name}: no CY structures")
    chi = adjunction_character(b, cy)
    lines = [
        f"{b.name} over {m.name}: CY structures = particular + kernel",
        f"  particular: {chi}",
        f"  kernel lattice basis: {[list(v) for v in cy.kernel.lattice_basis]}",
    ]
    if cy.kernel.torsion_orders:
        lines.append(f"  pi1 torsion orders: {list(cy.kernel.torsion_orders)}")
    if cy.kernel.rational_directions:
        lines.append(
            "  continuous directions: "
            + str([[str(x) for x in v] for v in cy.kernel.rational_directions])
        )
    lines.append(f"  continuous kernel dimension: {cy.kernel.continuous_dim}")
    return Report(payload, "\n".join(lines))


def cmd_rigidity(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    first = _bundle(args.bundle, m)
    second = _bundle(args.other, m)
    result = rigidity_solve(first, second, options.search_radius, options.max_candidates)
    text = f"rigidity {first.name} vs {second.name}: {result.outcome.value}"
    if result.xi is not None:
        text += f"\n  xi = {result.xi}\n  xi_dual (torus exponent) = {result.xi_dual.torus}"
    if result.message:
        text += f"\n  {result.message}"
    return Report({"m": first.name, "n": second.name, **result.to_json()}, text)


def cmd_construct_surjective(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    bundle = construct_surjective_bundle(m)
    cert = surjectivity_certificate(bundle, options.pic0_samples, options.sample_seed)
    passed = sum(c.passed for c in cert.checks)
    text = (
        f"{bundle.name}: group {bundle.group}\n"
        f"  preimages: {passed}/{len(cert.checks)}\n"
        f"  kernel dimension {cert.kernel_dim} (expected {cert.expected_kernel_dim})\n"
        f"  certificate {'passed' if cert.passed else 'FAILED'}"
    )
    return Report({"bundle": bundle.to_json(), "certificate": cert.to_json()}, text, 0 if cert.passed else 1)


def cmd_toric_cox(args, options: SolverOptions) -> Report:
    data = load_json_file(args.fan)
    if not isinstance(data, dict):
        raise InputError(f"{args.fan} must contain a JSON object")
    data.setdefault("name", pathlib.Path(args.fan).stem)
    fan = Fan.from_json(data)
    report = check_smooth_complete(fan)
    target = load_descriptor(args.manifold) if args.manifold else None
    bundle, cert, cox = audin_cox_bundle(fan, target)
    text = (
        f"{fan.name}: smooth={report.smooth} complete={report.complete}\n"
        f"  Cl = {cox.class_group}, K = {list(cox.canonical_class.coordinates)}\n"
        f"  quotient map Z^{fan.ray_count} -> Cl: {cox.quotient_map.matrix}\n"
        f"  H = (C*)^{cox.h_dim}, certificate {'passed' if cert.passed else 'FAILED'}"
    )
    payload = {
        "fan": fan.to_json(),
        "report": report.to_json(),
        "cox": cox.to_json(),
        "bundle": bundle.to_json(),
        "certificate": cert.to_json(),
    }
    return Report(payload, text, 0 if cert.passed else 1)


def cmd_rm_check(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    g = RmGroup(args.torus_rank, args.vector_rank, args.cousin_dim)
    report = sufficiency_check(g, m)
    payload: dict[str, Any] = {
        "group": g.to_json(),
        "manifold": m.name,
        "character_group": character_group(g).to_json(),
        **report.to_json(),
    }
    text = f"{g} over {m.name}: {report.verdict.value}\n  {report.reason}"
    if args.build and report.verdict is Verdict.SUFFICIENT:
        bundle = build_abelian_cy_bundle(g, m)
        cert = surjectivity_certificate(bundle, options.pic0_samples, options.sample_seed)
        solvable = obstruction_check(bundle).solvable
        payload["bundle"] = bundle.to_json()
        payload["certificate"] = cert.to_json()
        payload["cy"] = solvable
        text += f"\n  built {bundle.name}; certificate {'passed' if cert.passed else 'FAILED'}; CY={solvable}"
    return Report(payload, text)


def cmd_roots(args, options: SolverOptions) -> Report:
    m = _manifold(args)
    roots = rank1_roots(m)
    if roots.every_integer:
        text = f"{m.name}: K_X is trivial; every integer k, root = trivial class"
    else:
        text = f"{m.name}: K_X = k L for k in {roots.ks}"
        for r in roots.roots:
            text += f"\n  k={r.k:>3}: L = {r.root}"
            if r.torsion_translates > 1:
                text += f" ({r.torsion_translates} translates by torsion points of Pic0)"
    return Report({"manifold": m.name, **roots.to_json()}, text)


COMMANDS: dict[str, tuple[Callable[[Any, SolverOptions], Report], str]] = {
    "catalog": (cmd_catalog, "List the built-in manifold descriptors"),
    "validate": (cmd_validate, "Check the consistency relations of a descriptor"),
    "obstruct": (cmd_obstruct, "Decide whether a bundle admits a CY structure"),
    "cy-structures": (cmd_cy_structures, "Classify the CY structures of a bundle"),
    "rigidity": (cmd_rigidity, "Compare two torus bundles up to a twist"),
    "construct-surjective": (cmd_construct_surjective, "Build a CY bundle with onto character map"),
    "toric-cox": (cmd_toric_cox, "Audin-Cox bundle of a smooth complete fan"),
    "rm-check": (cmd_rm_check, "Check a (C*)^a x C^b x G0 structure group"),
    "roots": (cmd_roots, "Rank-one roots of the canonical class"),
}


def _add_common(parser: argparse.ArgumentParser, suppress: bool):
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--verbose", action="store_true", default=default(False), help="Enable verbose logging")
    parser.add_argument("--trace", action="store_true", default=default(False), help="Enable trace logging")
    parser.add_argument(
        "--config", type=str, default=default(defaults.CONFIG_PATH), help="Path to the configuration file"
    )
    parser.add_argument(
        "--format", choices=defaults.OUTPUT_FORMATS, default=default(None), help="Report format (default: text)"
    )
    parser.add_argument(
        "--search-radius", type=int, default=default(None), help="Rigidity kernel-coset search radius"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cybundle", description="Character maps of principal bundles")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parsers = {}
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        _add_common(p, suppress=True)
        parsers[name] = p
    for name in ("validate", "obstruct", "cy-structures", "rigidity", "construct-surjective", "rm-check", "roots"):
        parsers[name].add_argument("--manifold", type=str, default=None, help="Catalog name or descriptor JSON path")
    for name in ("obstruct", "cy-structures", "rigidity"):
        parsers[name].add_argument("--bundle", type=str, required=True, help="Bundle JSON path")
    parsers["rigidity"].add_argument("--other", type=str, required=True, help="Second bundle JSON path")
    parsers["toric-cox"].add_argument("--fan", type=str, required=True, help="Fan JSON path")
    parsers["toric-cox"].add_argument("--manifold", type=str, default=None, help="Target descriptor to check against")
    parsers["rm-check"].add_argument("--torus-rank", type=int, required=True)
    parsers["rm-check"].add_argument("--vector-rank", type=int, default=0)
    parsers["rm-check"].add_argument("--cousin-dim", type=int, default=0)
    parsers["rm-check"].add_argument("--build", action="store_true", help="Build the bundle when sufficient")
    return parser


def _configure_logging(args, options: SolverOptions):
    if args.trace:
        level = "TRACE"
    elif args.verbose:
        level = "DEBUG"
    elif options.output_format == "json":
        level = "WARNING"
    else:
        level = options.log_level
    logger.remove()
    logger.add(sys.stderr, level=level)


def _emit(report: Report, options: SolverOptions):
    if options.output_format == "json":
        print(json.dumps(report.payload, sort_keys=options.canonical, indent=2))
    else:
        print(report.text)


def _emit_error(e: CyBundleError):
    logger.error(e.message)
    print(json.dumps({"error": e.to_dict()}, sort_keys=True), file=sys.stderr)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else int(e.code)
    try:
        options = load_options(args.config, args.search_radius, args.format)
    except CyBundleError as e:
        _configure_logging(args, SolverOptions())
        _emit_error(e)
        return 1
    _configure_logging(args, options)
    handler, _ = COMMANDS[args.command]
    try:
        report = handler(args, options)
    except CyBundleError as e:
        _emit_error(e)
        return 1
    _emit(report, options)
    return report.exit_code


def main():
    sys.exit(run())
