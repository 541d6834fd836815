"""
Command-line surface: python -m coregular <subcommand> ...

Exit codes: 0 ok, 1 usage or input error, 2 theorem violation found,
3 internal consistency fault.
"""

from __future__ import annotations

import argparse
import json
import sys

from coregular import config
from coregular.diffr import different, dsp_check, transfer_image_profile
from coregular.gfcore import ConsistencyFault
from coregular.harness import (
    AnalysisOptions,
    AnalysisReport,
    analyze,
    enumerate_abelian_reflection_groups,
    load_spec,
    log_status,
    worked_example_spec,
    verify_theorem,
)
from coregular.invar import InvariantTable, algebra_generators

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_FAULT = 3

RULE = "=" * 72


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1, like every other input error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree-bound", type=int, default=None,
                        help="degree bound for every graded computation (default: max(|G|, n(|G|-1)), clamped)")
    common.add_argument("--output", choices=config.OUTPUT_FORMATS, default=None,
                        help="report format (default: COREGULAR_OUTPUT or text)")
    common.add_argument("--element-cap", type=int, default=None,
                        help="largest group closure allowed (default: COREGULAR_ELEMENT_CAP)")
    common.add_argument("--quiet", action="store_true", help="suppress progress lines (findings still print)")
    common.add_argument("--timing", action="store_true", help="include per-step timing in the report")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(
        prog="coregular",
        description="Coregularity, direct summand property and differents of abelian matrix groups over GF(p)",
        epilog=(
            "Examples:\n"
            "  python -m coregular worked-example\n"
            "  python -m coregular analyze fixtures/single_transvection_gf2.json --output json\n"
            "  python -m coregular verify-theorem --n 2 --p 3 --max-order 27"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="<command>", parser_class=_Parser)
    sub.required = True

    for name, help_text in (
        ("analyze", "full report for one group"),
        ("different", "hyperplane exponents and the different"),
        ("dsp", "direct summand property: witness or infeasibility"),
        ("transfer-image", "minimal generators of the image of the transfer"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("spec", help="group-spec JSON file")

    inv = sub.add_parser("invariants", parents=[common], help="invariant spaces and algebra generators")
    inv.add_argument("spec", help="group-spec JSON file")
    inv.add_argument("--max-degree", type=int, default=None, help="largest degree to list (default: degree bound)")

    sub.add_parser("worked-example", parents=[common], help="full report for the built-in (Z/2)^3 example")

    ver = sub.add_parser("verify-theorem", parents=[common], help="census of abelian reflection groups")
    ver.add_argument("--n", type=int, required=True, help="dimension")
    ver.add_argument("--p", type=int, required=True, help="prime")
    ver.add_argument("--max-order", type=int, required=True, help="largest group order to include")
    ver.add_argument("--sampled", action="store_true", help="seeded random sample instead of exhaustive search")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--count", type=int, default=200, help="sample size in --sampled mode")
    ver.add_argument("--workers", type=int, default=None, help="process workers (default: COREGULAR_WORKERS)")
    return parser


def _options(args) -> AnalysisOptions:
    if args.degree_bound is not None and args.degree_bound < 1:
        raise ValueError("--degree-bound must be at least 1")
    cap = args.element_cap if args.element_cap is not None else config.get_element_cap()
    if cap < 1:
        raise ValueError("--element-cap must be positive")
    return AnalysisOptions(
        degree_bound=args.degree_bound,
        degree_cap=config.get_degree_cap(),
        element_cap=cap,
        quiet=args.quiet,
    )


def _emit_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _yes(flag) -> str:
    if flag is None:
        return "--"
    return "yes" if flag else "no"


def _field(label, value):
    print(f"  {label:<30} {value}")


# ── Renderers ────────────────────────────────────────────────────────────────

def render_report(report: AnalysisReport, timing=False):
    s = report.sections
    g = s["group"]
    print()
    print(RULE)
    print(f"  COREGULARITY REPORT  -  {report.name}")
    print(f"  GF({g['p']})^{g['n']}   |G| = {g['order']}")
    print(RULE)
    print()
    _field("Abelian", _yes(g["abelian"]))
    _field("p-group", _yes(g["p_group"]))
    _field("Non-modular", _yes(g["non_modular"]))
    _field("Transvections / homologies", f"{g['transvections']} / {g['homologies']}")
    _field("Generated by reflections", _yes(g["reflection_group"]))
    _field("|T| x |D|", f"{g['T_order']} x {g['D_order']}")
    _field("dim V^G", g["fixed_space_dim"])
    if report.out_of_scope:
        print()
        print("  Out of theorem scope: the group is not abelian.")
        print()
        print(RULE)
        return

    print()
    _field("Degree bound", s["degree_bound"])
    diff = s["different"]
    _field("Different theta", diff["theta"])
    _field("deg theta", diff["degree"])
    for h in diff["hyperplanes"]:
        _field(f"  a_H for {h['form']}", f"{h['exponent']}  (|G_H| = {h['stabilizer_order']}, {h['kind']})")
    dsp = s["dsp"]
    _field("Direct summand property", _yes(dsp["holds"]))
    if dsp["holds"]:
        _field("  witness", dsp["witness"])
    else:
        _field("  system rank / augmented", f"{dsp['system_rank']} / {dsp['augmented_rank']}")
    _field("Algebra generator degrees", s["algebra_generators"]["degrees"])
    _field("Hilbert series", s["hilbert_series"])
    hilb = s["hilbert_ideal"]
    _field("Hilbert ideal degrees", f"{hilb['generator_degrees']}  (mu = {hilb['min_generators']})")
    _field("  complete intersection", _yes(hilb["is_complete_intersection"]))
    rel = s["relative_hilbert_ideal"]
    _field("Hilb_{V^G} generators", ", ".join(rel["generators"]) or "(none)")
    _field("  complete intersection", _yes(rel["is_complete_intersection"]))
    img = s["transfer_image"]
    principal = _yes(img["principal"]) + ("  (degenerate: Tr is onto)" if img["degenerate"] else "")
    _field("Transfer image principal", principal)
    _field("  minimal generators", img["min_generators"])
    restriction = s["restriction"]
    _field("Restriction to V^G", f"degrees {restriction['generator_degrees']}, polynomial: "
                                 f"{_yes(restriction['is_polynomial'])}")
    contraction = s.get("linear_contraction")
    if contraction:
        _field("J = J^ec for linear forms", _yes(contraction["equal"]))
        if contraction["new_generators"]:
            _field("  new in J^ec", ", ".join(contraction["new_generators"]))
    if s.get("series_check"):
        _field("Series = T-series * D-series", _yes(s["series_check"]["holds"]))
    if s.get("factors"):
        f = s["factors"]
        _field("Factor verdicts (T, D)", f"{_yes(f['T_on_fixed']['coregular'])}, {_yes(f['D_on_moved']['coregular'])}")

    verdict = s["verdict"]
    print()
    print(f"  {'-' * 30} {'-' * 20}")
    _field("COREGULAR", _yes(verdict["verdict"] == "coregular"))
    if verdict["certificate_degrees"]:
        _field("  certificate degrees", verdict["certificate_degrees"])
    if verdict["failure_witness"]:
        _field("  failed", verdict["failure_witness"])
    if report.findings:
        print()
        for note in report.findings:
            print(f"  Finding: {note}")
    if timing and report.timing:
        print()
        for label, seconds in report.timing.items():
            _field(label, f"{seconds:.3f}s")
    print()
    print(RULE)


def render_census(census, title):
    print()
    print(RULE)
    print(f"  THEOREM CENSUS  -  {title}")
    print(RULE)
    print()
    print(f"  {'GROUP':<22} {'|G|':>5} {'REFL':>5} {'DSP':>5} {'CI':>5} {'COREG':>6} {'TR-PR':>6} {'OK':>4}")
    print(f"  {'-' * 22} {'-' * 5} {'-' * 5} {'-' * 5} {'-' * 5} {'-' * 6} {'-' * 6} {'-' * 4}")
    for r in census.rows:
        principal = _yes(r.transfer_principal) if r.p_group else "n/a"
        print(
            f"  {r.name:<22} {r.order:>5} {_yes(r.is_reflection_group):>5} {_yes(r.dsp):>5} "
            f"{_yes(r.hilb_ci):>5} {_yes(r.coregular):>6} {principal:>6} {_yes(r.ok):>4}"
        )
    summary = census.summary()
    print()
    for key in ("groups", "reflection_groups", "coregular", "p_groups", "violations"):
        _field(key.replace("_", " ").capitalize(), summary[key])
    if summary["truncated"]:
        _field("Truncated", "yes")
    for r in census.violations:
        print()
        print(f"  COUNTEREXAMPLE {r.name}  {r.signature}")
        for v in r.violations:
            print(f"    {v}")
    print()
    print(RULE)


# ── Commands ─────────────────────────────────────────────────────────────────

def _cmd_report(spec, args, output) -> int:
    report = analyze(spec, _options(args))
    if output == "json":
        print(report.to_json(include_timing=args.timing))
    else:
        render_report(report, timing=args.timing)
    return EXIT_OK


def _abelian_group(spec, options):
    group = spec.group(options.element_cap)
    if not group.is_abelian:
        raise ValueError(f"{spec.name}: group is not abelian")
    return group


def _cmd_different(spec, args, output) -> int:
    group = _abelian_group(spec, _options(args))
    diff = different(group)
    if output == "json":
        _emit_json(dict(diff.as_dict(), name=spec.name))
        return EXIT_OK
    print()
    print(RULE)
    print(f"  DIFFERENT  -  {spec.name}   |G| = {group.order}")
    print(RULE)
    print()
    print(f"  {'HYPERPLANE':<24} {'KIND':<14} {'|G_H|':>6} {'a_H':>4}  WITNESS")
    print(f"  {'-' * 24} {'-' * 14} {'-' * 6} {'-' * 4}  {'-' * 16}")
    for h in diff.exponents:
        print(f"  {str(h.form_polynomial):<24} {h.kind.value:<14} {h.stabilizer_order:>6} {h.exponent:>4}  {h.witness}")
    print()
    _field("theta", diff.theta)
    _field("degree", diff.degree)
    _field("character trivial", _yes(diff.theta_character.is_trivial))
    for note in diff.findings:
        print(f"  Finding: {note}")
    print()
    print(RULE)
    return EXIT_OK


def _cmd_dsp(spec, args, output) -> int:
    group = _abelian_group(spec, _options(args))
    diff = different(group)
    result = dsp_check(group, diff)
    if output == "json":
        _emit_json(dict(result.as_dict(), name=spec.name, theta=str(diff.theta)))
        return EXIT_OK
    print()
    print(RULE)
    print(f"  DIRECT SUMMAND PROPERTY  -  {spec.name}")
    print(RULE)
    print()
    _field("theta", diff.theta)
    _field("holds", _yes(result.holds))
    if result.holds:
        _field("witness", result.witness)
    _field("system size", f"{result.system_dim} x {result.system_dim}")
    _field("rank / augmented rank", f"{result.system_rank} / {result.augmented_rank}")
    print()
    print(RULE)
    return EXIT_OK


def _cmd_invariants(spec, args, output) -> int:
    options = _options(args)
    group = spec.group(options.element_cap)
    bound = options.bound_for(group)
    top = args.max_degree if args.max_degree is not None else bound
    if top < 0:
        raise ValueError("--max-degree must be non-negative")
    table = InvariantTable(group, top)
    gens = algebra_generators(group, top, table) if top >= 1 else []
    if output == "json":
        _emit_json({
            "name": spec.name,
            "max_degree": top,
            "dims": list(table.series(top)),
            "bases": {str(d): [str(f) for f in table[d].basis] for d in range(top + 1)},
            "algebra_generators": [{"degree": d, "polynomial": str(f)} for d, f in gens],
        })
        return EXIT_OK
    print()
    print(RULE)
    print(f"  INVARIANTS  -  {spec.name}   degrees 0..{top}")
    print(RULE)
    for d in range(top + 1):
        basis = table[d].basis
        print()
        print(f"  degree {d}: dim {len(basis)}")
        for f in basis:
            print(f"    {f}")
    print()
    _field("Algebra generators", "")
    for d, f in gens:
        print(f"    [{d}] {f}")
    print()
    print(RULE)
    return EXIT_OK


def _cmd_transfer_image(spec, args, output) -> int:
    options = _options(args)
    group = spec.group(options.element_cap)
    bound = options.bound_for(group)
    profile = transfer_image_profile(group, InvariantTable(group, bound), bound)
    if output == "json":
        _emit_json(dict(profile.as_dict(), name=spec.name))
        return EXIT_OK
    print()
    print(RULE)
    print(f"  TRANSFER IMAGE  -  {spec.name}   degree bound {bound}")
    print(RULE)
    print()
    _field("per-degree dims", list(profile.per_degree_dims))
    _field("minimal generators", profile.min_generators)
    _field("principal", _yes(profile.principal) + ("  (degenerate)" if profile.degenerate else ""))
    for g in profile.generators:
        print(f"    {g}")
    print()
    print(RULE)
    return EXIT_OK


def _cmd_verify(args, output) -> int:
    options = _options(args)
    if args.n < 1 or args.max_order < 1 or args.count < 1:
        raise ValueError("--n, --max-order and --count must be positive")
    workers = args.workers if args.workers is not None else config.get_workers()
    mode = "sampled" if args.sampled else "exhaustive"
    log_status(f"enumerating abelian reflection groups (n={args.n}, p={args.p}, {mode})", args.quiet)
    enumeration = enumerate_abelian_reflection_groups(
        args.n, args.p, args.max_order, mode=mode, seed=args.seed, count=args.count,
        element_cap=options.element_cap,
    )
    census = verify_theorem(enumeration.specs, options, workers=max(1, workers), truncated=enumeration.truncated)
    if output == "json":
        print(census.to_json())
    else:
        render_census(census, f"n={args.n} p={args.p} |G|<={args.max_order} ({mode})")
    return EXIT_VIOLATION if census.violations else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    output = args.output or config.get_default_output()
    try:
        if args.command == "verify-theorem":
            return _cmd_verify(args, output)
        if args.command == "worked-example":
            return _cmd_report(worked_example_spec(), args, output)
        spec = load_spec(args.spec)
        handler = {
            "analyze": _cmd_report,
            "different": _cmd_different,
            "dsp": _cmd_dsp,
            "invariants": _cmd_invariants,
            "transfer-image": _cmd_transfer_image,
        }[args.command]
        return handler(spec, args, output)
    except ConsistencyFault as e:
        print(f"Internal consistency fault: {e}", file=sys.stderr)
        return EXIT_FAULT
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
