"""
Group-spec ingestion, full analysis reports and theorem verification.

A group spec is a JSON document {"name", "p", "n", "generators"} with
matrices acting on column vectors. `analyze` runs every computation on one
group; `verify_theorem` turns a batch into census rows and checks, per row,
that coregularity matches "reflection group and DSP" and, for p-groups, that
it matches principality of the transfer image.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Optional, Sequence

import numpy as np

from coregular import config, gfcore
from coregular.diffr import (
    different,
    dsp_check,
    lift_dsp_witness,
    restrict_dsp_witness,
    transfer_image_profile,
)
from coregular.invar import (
    InvariantTable,
    algebra_generators,
    brute_force_invariant_dim,
    contract_extend,
    decide_coregular,
    hilbert_ideal,
    hilbert_series_checks,
    polynomial_certificate,
    relative_hilbert_ideal,
    resolve_degree_bound,
    restriction_profile,
    subalgebra_dims,
)
from coregular.matrixgroup import (
    ElementCapError,
    Group,
    classify_element,
    close_group,
    decompose,
    fixed_space,
    list_reflections,
    reflection_census,
)

SCHEMA_VERSION = "1"
SERIES_DEGREE = 8
ORACLE_MAX_N = 3
ORACLE_MAX_DEGREE = 6
MAX_ENUMERATED_GROUPS = 5000
STALE_DRAWS = 2000

WORKED_EXAMPLE_GENERATORS = (
    ((1, 0, 0, 0), (0, 1, 0, 0), (1, 0, 1, 0), (0, 0, 0, 1)),
    ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1)),
    ((1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 1, 0), (1, 1, 0, 1)),
)


class SpecError(ValueError):
    """Malformed group-spec document."""


def log_status(message, quiet=False):
    """Timestamped progress line on stderr (stdout carries reports only)."""
    if quiet:
        return
    print(f"[{datetime.now().strftime('%H:%M:%S')}] {message}", file=sys.stderr, flush=True)


def log_finding(message, kind="Finding"):
    print(f"[{datetime.now().strftime('%H:%M:%S')}] {kind}: {message}", file=sys.stderr, flush=True)


# ── Specs ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GroupSpec:
    name: str
    p: int
    n: int
    generators: tuple

    def group(self, element_cap=None) -> Group:
        return close_group(self.p, self.n, [list(g) for g in self.generators], element_cap=element_cap)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "p": self.p,
            "n": self.n,
            "generators": [[list(row) for row in g] for g in self.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_spec(data) -> GroupSpec:
    """Validate a group-spec document; entries are reduced mod p."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SpecError(f"spec is not UTF-8: {e}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError("top level: expected an object with name, p, n, generators")

    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise SpecError("name: expected a string")
    p = doc.get("p")
    if not _is_int(p):
        raise SpecError("p: expected an integer")
    if not gfcore.is_prime(p) or p > gfcore.MAX_MODULUS:
        raise SpecError(f"p: {p} is not a supported prime")
    n = doc.get("n")
    if not _is_int(n) or n < 1:
        raise SpecError("n: expected an integer >= 1")
    gens = doc.get("generators", [])
    if not isinstance(gens, list):
        raise SpecError("generators: expected a list of matrices")

    reduced = []
    for i, g in enumerate(gens):
        where = f"generators[{i}]"
        if not isinstance(g, list) or len(g) != n:
            raise SpecError(f"{where}: expected {n} rows")
        rows = []
        for r, row in enumerate(g):
            if not isinstance(row, list) or len(row) != n:
                raise SpecError(f"{where}[{r}]: expected {n} entries")
            for c, v in enumerate(row):
                if not _is_int(v):
                    raise SpecError(f"{where}[{r}][{c}]: expected an integer, got {v!r}")
            rows.append(tuple(v % p for v in row))
        if not gfcore.is_invertible(np.array(rows, dtype=np.int64), p):
            raise SpecError(f"{where}: singular generator mod {p}")
        reduced.append(tuple(rows))
    return GroupSpec(name=name, p=p, n=n, generators=tuple(reduced))


def load_spec(path) -> GroupSpec:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise SpecError(f"{path}: {e.strerror}") from None
    try:
        return parse_spec(raw)
    except SpecError as e:
        raise SpecError(f"{path}: {e}") from None


def worked_example_spec() -> GroupSpec:
    """(Z/2)^3 on F_2^4 generated by three commuting transvection products."""
    return GroupSpec(name="worked-example", p=2, n=4, generators=WORKED_EXAMPLE_GENERATORS)


# ── Analysis ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class AnalysisOptions:
    degree_bound: Optional[int] = None
    degree_cap: int = config.DEFAULT_DEGREE_CAP
    element_cap: int = config.DEFAULT_ELEMENT_CAP
    quiet: bool = True

    def bound_for(self, group: Group) -> int:
        return resolve_degree_bound(group.order, group.n, self.degree_bound, self.degree_cap)


@dataclass
class AnalysisReport:
    name: str
    sections: dict
    timing: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    @property
    def out_of_scope(self) -> bool:
        return bool(self.sections.get("out_of_scope"))

    def get(self, *path):
        value = self.sections
        for key in path:
            if value is None:
                return None
            value = value.get(key)
        return value

    def as_dict(self, include_timing=False) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "name": self.name, "findings": list(self.findings)}
        out.update(self.sections)
        if include_timing:
            out["timing"] = dict(self.timing)
        return out

    def to_json(self, include_timing=False) -> str:
        return json.dumps(self.as_dict(include_timing), indent=2, sort_keys=True)


class _Stopwatch:
    def __init__(self, quiet):
        self.quiet = quiet
        self.timing = {}

    def run(self, label, fn, *args, **kwargs):
        log_status(f"{label}...", self.quiet)
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        self.timing[label] = round(time.perf_counter() - start, 3)
        return result


def _group_facts(group: Group, census) -> dict:
    return {
        "p": group.p,
        "n": group.n,
        "order": group.order,
        "abelian": group.is_abelian,
        "p_group": group.is_p_group,
        "non_modular": group.is_non_modular,
        "reflection_group": census.is_reflection_group,
        "transvections": len(census.transvections),
        "homologies": len(census.homologies),
        "T_order": census.T.order,
        "D_order": census.D.order,
        "fixed_space_dim": fixed_space(group).dim,
    }


def _factor_verdict(factor: Group, bound) -> dict:
    if factor.n == 0:
        return {"n": 0, "order": factor.order, "coregular": True, "certificate_degrees": []}
    gens = algebra_generators(factor, bound)
    certificate = polynomial_certificate(factor, gens)
    return {
        "n": factor.n,
        "order": factor.order,
        "generator_degrees": [d for d, _ in gens],
        "coregular": certificate is not None,
        "certificate_degrees": list(certificate) if certificate else None,
    }


def analyze(spec: GroupSpec, options: Optional[AnalysisOptions] = None) -> AnalysisReport:
    """Run every computation on one group and collect a report."""
    options = options or AnalysisOptions()
    watch = _Stopwatch(options.quiet)
    group = watch.run("closing group", spec.group, options.element_cap)
    census = watch.run("classifying elements", reflection_census, group)
    sections = {"group": _group_facts(group, census), "out_of_scope": False}
    report = AnalysisReport(spec.name, sections, watch.timing)

    if not group.is_abelian:
        sections["out_of_scope"] = True
        report.findings.append("group is not abelian: analysis limited to the element census")
        log_finding(report.findings[-1], "Warning")
        return report

    bound = options.bound_for(group)
    sections["degree_bound"] = bound
    table = InvariantTable(group, bound)

    diff = watch.run("computing the different", different, group, True, census)
    for note in diff.findings:
        report.findings.append(note)
        log_finding(note)
    dsp = watch.run("solving the DSP system", dsp_check, group, diff)
    gens = watch.run("algebra generators", algebra_generators, group, bound, table)
    hilb = watch.run("Hilbert ideal", hilbert_ideal, group, bound, table)
    v_fixed = fixed_space(group)
    relative = watch.run("relative Hilbert ideal", relative_hilbert_ideal, group, v_fixed, bound, table)
    image = watch.run("transfer image", transfer_image_profile, group, table, bound)
    verdict = watch.run("coregularity verdict", decide_coregular, group, bound, dsp, table, hilb, gens)

    sections["different"] = diff.as_dict()
    sections["dsp"] = dsp.as_dict()
    sections["algebra_generators"] = {
        "degrees": [d for d, _ in gens],
        "generators": [str(g) for _, g in gens],
        "degree_bound": bound,
    }
    sections["hilbert_series"] = list(table.series(bound))
    sections["hilbert_ideal"] = hilb.as_dict()
    sections["relative_hilbert_ideal"] = dict(relative.as_dict(), subspace_dim=v_fixed.dim)
    sections["transfer_image"] = image.as_dict()
    sections["verdict"] = verdict.as_dict()

    sections["decomposition"] = None
    sections["series_check"] = None
    sections["factors"] = None
    if census.is_reflection_group:
        dec = decompose(group, census)
        sections["decomposition"] = {
            "T_order": dec.T.order,
            "D_order": dec.D.order,
            "V_fixed_D_dim": dec.V_fixed_D.dim,
            "V_moved_D_dim": dec.V_moved_D.dim,
        }
        series = watch.run(
            "Hilbert series product check", hilbert_series_checks, group, dec, min(bound, SERIES_DEGREE), table
        )
        sections["series_check"] = series.as_dict()
        if not series.holds:
            report.findings.append(f"Hilbert series product identity fails in degree {series.first_failing_degree}")
            log_finding(report.findings[-1])
        t_factor = _factor_verdict(dec.T_on_fixed(), bound)
        d_factor = _factor_verdict(dec.D_on_moved(), bound)
        agrees = (t_factor["coregular"] and d_factor["coregular"]) == verdict.is_coregular
        sections["factors"] = {"T_on_fixed": t_factor, "D_on_moved": d_factor, "agrees": agrees}
        if not agrees:
            raise gfcore.ConsistencyFault(
                f"factor verdicts T: {t_factor['coregular']}, D: {d_factor['coregular']} "
                f"disagree with the verdict for G: {verdict.verdict}"
            )

    sections["restriction"] = watch.run("restriction to V^G", restriction_profile, group, v_fixed, bound, table).as_dict()
    linear = table[1].basis
    if linear:
        contraction = watch.run("J^ec for the invariant linear forms", contract_extend, group, linear, bound, table)
        sections["linear_contraction"] = contraction.as_dict()
    else:
        sections["linear_contraction"] = None
    log_status(f"done: {verdict.verdict} (degree bound {bound})", options.quiet)
    return report


# ── Enumeration ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Enumeration:
    specs: tuple
    truncated: bool
    considered: int


def _commutes(a, b, p) -> bool:
    return np.array_equal(gfcore.mat_mul(a, b, p), gfcore.mat_mul(b, a, p))


def group_signature(group: Group) -> tuple:
    """(p, n, order, sorted (kind, charpoly) multiset): cheap, not a conjugacy test."""
    entries = sorted(
        (classify_element(g, group.p).kind.value, gfcore.characteristic_polynomial(g, group.p))
        for g in group.elements
    )
    return (group.p, group.n, group.order, tuple(entries))


def _spec_for(name, p, n, generators) -> GroupSpec:
    return GroupSpec(name, p, n, tuple(tuple(tuple(int(v) for v in row) for row in g) for g in generators))


def enumerate_abelian_reflection_groups(
    n, p, max_order, mode="exhaustive", seed=0, count=200, element_cap=None, max_groups=MAX_ENUMERATED_GROUPS
) -> Enumeration:
    """Abelian groups generated by pseudo-reflections of GL_n(F_p) with |G| <= max_order."""
    reflections = list_reflections(n, p)
    if mode == "sampled":
        return _sample(n, p, max_order, reflections, seed, count, element_cap)
    if mode != "exhaustive":
        raise ValueError(f"unknown enumeration mode {mode!r}")

    trivial = close_group(p, n, [])
    seen = {frozenset(trivial.index)}
    frontier = [((), trivial)]
    found = []
    truncated = False
    considered = 0
    while frontier and not truncated:
        next_frontier = []
        for gens, group in frontier:
            for idx, r in enumerate(reflections):
                if group.contains(r) or not all(_commutes(r, g, p) for g in group.generators):
                    continue
                considered += 1
                try:
                    candidate = close_group(p, n, list(group.generators) + [r], element_cap=max_order + 1)
                except ElementCapError:
                    continue
                if candidate.order > max_order:
                    continue
                key = frozenset(candidate.index)
                if key in seen:
                    continue
                seen.add(key)
                entry = (gens + (idx,), candidate)
                found.append(entry)
                next_frontier.append(entry)
                if len(found) >= max_groups:
                    truncated = True
                    break
            if truncated:
                break
        frontier = next_frontier

    specs, signatures = [], set()
    for gens, group in found:
        signature = group_signature(group)
        if signature in signatures:
            continue
        signatures.add(signature)
        name = f"n{n}-p{p}-{len(specs):04d}"
        specs.append(_spec_for(name, p, n, [reflections[i] for i in gens]))
    return Enumeration(tuple(specs), truncated, considered)


def _sample(n, p, max_order, reflections, seed, count, element_cap) -> Enumeration:
    """Up to `count` distinct groups; stops early once draws keep repeating."""
    rng = np.random.default_rng(seed)
    specs = []
    seen = set()
    attempts = 0
    stale = 0
    limit = 50 * count
    while len(specs) < count and attempts < limit and stale < STALE_DRAWS:
        attempts += 1
        stale += 1
        size = int(rng.integers(1, n + 1))
        chosen = [reflections[int(rng.integers(len(reflections)))]]
        for idx in rng.permutation(len(reflections)):
            if len(chosen) >= size:
                break
            r = reflections[int(idx)]
            if all(_commutes(r, c, p) for c in chosen):
                chosen.append(r)
        try:
            group = close_group(p, n, chosen, element_cap=max_order + 1)
        except ValueError:
            continue
        if group.order > max_order or group.keys in seen:
            continue
        seen.add(group.keys)
        stale = 0
        specs.append(_spec_for(f"n{n}-p{p}-s{seed}-{len(specs):04d}", p, n, chosen))
    return Enumeration(tuple(specs), len(specs) < count and stale < STALE_DRAWS, attempts)


# ── Theorem census ───────────────────────────────────────────────────────────

@dataclass
class CensusRow:
    name: str
    signature: str
    order: int
    p_group: bool
    abelian: bool
    is_reflection_group: bool
    dsp: Optional[bool]
    hilb_ci: Optional[bool]
    coregular: Optional[bool]
    transfer_principal: Optional[bool]
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "signature": self.signature,
            "order": self.order,
            "p_group": self.p_group,
            "abelian": self.abelian,
            "reflection_group": self.is_reflection_group,
            "dsp": self.dsp,
            "hilb_ci": self.hilb_ci,
            "coregular": self.coregular,
            "transfer_principal": self.transfer_principal,
            "checks": dict(self.checks),
            "violations": list(self.violations),
            "notes": list(self.notes),
        }


def _signature_text(group: Group) -> str:
    p, n, order, entries = group_signature(group)
    counts = {}
    for kind, charpoly in entries:
        key = f"{kind}:{''.join(str(c) for c in charpoly)}"
        counts[key] = counts.get(key, 0) + 1
    body = ",".join(f"{k}x{v}" for k, v in sorted(counts.items()))
    return f"p{p}n{n}o{order}[{body}]"


def _check(row: CensusRow, name, passed, message):
    row.checks[name] = bool(passed)
    if not passed:
        row.violations.append(message)


def census_row(spec: GroupSpec, options: AnalysisOptions) -> CensusRow:
    """Analyze one group and test every proposition that applies to it."""
    group = spec.group(options.element_cap)
    census = reflection_census(group)
    row = CensusRow(
        name=spec.name,
        signature=_signature_text(group),
        order=group.order,
        p_group=group.is_p_group,
        abelian=group.is_abelian,
        is_reflection_group=census.is_reflection_group,
        dsp=None,
        hilb_ci=None,
        coregular=None,
        transfer_principal=None,
    )
    if not group.is_abelian:
        row.notes.append("not abelian: outside the theorem")
        return row

    bound = options.bound_for(group)
    table = InvariantTable(group, bound)
    diff = different(group, True, census)
    dsp = dsp_check(group, diff)
    hilb = hilbert_ideal(group, bound, table)
    gens = algebra_generators(group, bound, table)
    verdict = decide_coregular(group, bound, dsp, table, hilb, gens)
    image = transfer_image_profile(group, table, bound)
    row.dsp, row.hilb_ci = dsp.holds, hilb.is_complete_intersection
    row.coregular, row.transfer_principal = verdict.is_coregular, image.principal
    row.notes.extend(diff.findings)

    _check(row, "theorem", row.coregular == (census.is_reflection_group and dsp.holds),
           f"coregular={row.coregular} but reflection={census.is_reflection_group}, dsp={dsp.holds}")
    if group.is_p_group:
        _check(row, "corollary", image.principal == row.coregular,
               f"transfer image principal={image.principal} but coregular={row.coregular}")

    v_fixed = fixed_space(group)
    relative = relative_hilbert_ideal(group, v_fixed, bound, table)
    if relative.is_complete_intersection:
        _check(row, "relative_ci_implies_ci", hilb.is_complete_intersection,
               "Hilb_{V^G} is a complete intersection but Hilb is not")

    if census.is_reflection_group and not census.homologies:
        _check(row, "transvection_p_group", group.is_p_group, f"transvection group of order {group.order}")
        forms = [r.x_rho for r in census.transvections]
        fixed = all(not ((r.x_rho @ inv - r.x_rho) % group.p).any() for r in census.transvections for inv in group.inverses)
        _check(row, "transvection_forms_invariant", fixed, "some x_tau is not fixed by G")
        _check(row, "transvection_relative_ci",
               relative.is_complete_intersection and relative.min_generators == v_fixed.codim,
               f"Hilb_{{V^G}} has {relative.min_generators} generators, codim V^G = {v_fixed.codim}")
        span = gfcore.Subspace.span(np.array(forms), group.n, group.p)
        _check(row, "fixed_space_annihilator", v_fixed.perp() == span, "(V^G)^perp differs from span of x_tau")

    if census.is_reflection_group:
        dec = decompose(group, census)
        series = hilbert_series_checks(group, dec, SERIES_DEGREE)
        _check(row, "series_product", series.holds, f"series identity fails at degree {series.first_failing_degree}")
        dsp_t = dsp_check(dec.T, different(dec.T, False))
        t_fixed = dec.T_on_fixed()
        dsp_t_fixed = dsp_check(t_fixed, different(t_fixed, False))
        _check(row, "dsp_reduction", dsp.holds == dsp_t.holds == dsp_t_fixed.holds,
               f"dsp(G)={dsp.holds}, dsp(T on V)={dsp_t.holds}, dsp(T on V^D)={dsp_t_fixed.holds}")
        if dsp.holds:
            restricted = restrict_dsp_witness(group, dec, dsp)
            lifted = lift_dsp_witness(group, dec, restricted.projected)
            _check(row, "witness_transport", restricted.projected_verified and lifted.verified,
                   "DSP witness did not survive restriction and lift")

    if group.n <= ORACLE_MAX_N:
        agree = all(table.dim(d) == brute_force_invariant_dim(group, d) for d in range(ORACLE_MAX_DEGREE + 1))
        _check(row, "oracle_dims", agree, "kernel-rank invariant dimensions differ from the oracle")

    if dsp.holds and hilb.is_complete_intersection:
        generated = subalgebra_dims(list(hilb.generators), group.n, group.p, bound)
        _check(row, "hilbert_argument", generated == table.series(bound),
               "Hilbert ideal generators do not generate the invariant ring")
    if dsp.holds and table[1].dim:
        contraction = contract_extend(group, table[1].basis, bound, table)
        _check(row, "j_equals_jec", contraction.equal,
               f"J^ec differs from J in degree {contraction.first_strict_degree}")
    return row


@dataclass
class TheoremCensus:
    rows: list
    truncated: bool = False

    @property
    def violations(self) -> list:
        return [row for row in self.rows if not row.ok]

    def summary(self) -> dict:
        abelian = [r for r in self.rows if r.abelian]
        return {
            "groups": len(self.rows),
            "abelian": len(abelian),
            "reflection_groups": sum(r.is_reflection_group for r in abelian),
            "coregular": sum(bool(r.coregular) for r in abelian),
            "p_groups": sum(r.p_group for r in abelian),
            "violations": len(self.violations),
            "truncated": self.truncated,
        }

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "summary": self.summary(),
            "rows": [r.as_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _row_worker(args):
    spec, options = args
    return census_row(spec, options)


def verify_theorem(
    specs: Sequence[GroupSpec],
    options: Optional[AnalysisOptions] = None,
    workers: int = 1,
    truncated: bool = False,
    progress: Optional[Callable[[str], None]] = None,
) -> TheoremCensus:
    """One census row per spec, in input order for any worker count."""
    options = options or AnalysisOptions()
    progress = progress or (lambda message: log_status(message, options.quiet))
    jobs = [(spec, options) for spec in specs]
    progress(f"verifying {len(jobs)} groups with {workers} worker(s)")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_row_worker, jobs))
    else:
        rows = []
        for i, job in enumerate(jobs, 1):
            rows.append(_row_worker(job))
            if i % 25 == 0:
                progress(f"{i}/{len(jobs)} groups checked")
    result = TheoremCensus(rows, truncated)
    for row in result.violations:
        log_finding(f"{row.name}: {'; '.join(row.violations)}")
    if truncated:
        log_finding("enumeration was truncated; the census is partial", "Warning")
    return result
