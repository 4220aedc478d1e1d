"""Command-line workbench: input files, subcommand dispatch, JSON reports.

Field files (``.vf``) are line oriented, ``key: value`` with ``#`` comments::

    coords: x y
    time: t
    vanishing: y
    field: (y, x*t)
    field: (1, 0)

Recognised keys are ``coords``, ``time``, ``vanishing``, ``field``,
``generator`` (foliation generators), ``hamiltonian`` and ``degree-bound``.
``field``, ``generator`` and ``hamiltonian`` may repeat.

Setup files are JSON, either a built-in geometry::

    {"geometry": "symplectic", "N": 1, "vanishing": ["y"]}
    {"geometry": "foliation", "coords": ["x", "y"], "generators": ["(1, x)"],
     "vanishing": ["y"]}

or a sheaf and obstruction given explicitly::

    {"coords": ["x", "y"], "vanishing": ["y"],
     "sheaf": {"kind": "constant", "generators": ["(1, 0)"]},
     "obstruction": {"kind": "explicit", "generators": ["(1, 0)"], "ideal": ["x"]}}

Problem files add ``"setup"`` (inline object or a path relative to the
problem file), ``"seed"``, ``"order"`` and ``"corrections"``.  Cech files
carry ``"setup"``, ``"order"``, ``"charts"`` and optionally ``"splitting"``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path
from typing import Sequence

from .admissibility import (
    correction_field,
    extend_admissible,
    extension_congruences,
    is_admissible,
)
from .fields import Chart, TimeDepVectorField, VectorField, lie_bracket, lie_D
from .foliation import (
    TangencyTwist,
    check_foliation_bracket,
    tangency_ideal,
    velocity_in_foliation,
)
from .geometry import (
    ConstantSpan,
    DeformationSetup,
    ExplicitModule,
    FoliationSpan,
    FullRestriction,
    FullTangent,
    HypothesisError,
    SubspaceY,
)
from .jets import difference_formula, flow_jet, jet_difference, jet_restrict, jets_agree_on
from .lifting import DeformationProblem, cech_cocycle, cech_glue, lift_to_order
from .parsing import ParseError, parse_expression, parse_field
from .symplectic import (
    DarbouxSpace,
    HamiltonianSheaf,
    Perp,
    check_bracket_perp,
    contraction_forms,
    ham_field,
    hamiltonian_extension,
    is_hamiltonian,
    pullback_form_along_flow,
)

SCHEMA = "jetlift-report/1"

__all__ = ["SCHEMA", "InputError", "FieldFile", "RunReport", "load_field_file", "load_setup",
           "load_problem", "run", "main"]


class InputError(ValueError):
    """Malformed input file or a missing piece of input."""


# --- field files --------------------------------------------------------------


@dataclass
class FieldFile:
    chart: Chart
    vanishing: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    generators: list = field(default_factory=list)
    hamiltonians: list = field(default_factory=list)
    degree_bound: int | None = None

    @property
    def subspace(self) -> SubspaceY:
        return SubspaceY.from_names(self.chart, self.vanishing)

    def need_fields(self, k: int, what: str) -> list:
        if len(self.fields) < k:
            raise InputError(f"{what} needs {k} field line(s), found {len(self.fields)}")
        return self.fields[:k]


_REPEATED = {"field", "generator", "hamiltonian"}
_KEYS = {"coords", "time", "vanishing", "degree-bound"} | _REPEATED


def parse_field_text(text: str, source: str = "<text>") -> FieldFile:
    entries: dict = {k: [] for k in _KEYS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep or key not in _KEYS:
            raise InputError(f"{source}:{lineno}: expected 'key: value' with key in {sorted(_KEYS)}")
        if key not in _REPEATED and entries[key]:
            raise InputError(f"{source}:{lineno}: repeated key {key!r}")
        entries[key].append((lineno, value.strip()))
    if not entries["coords"]:
        raise InputError(f"{source}: missing 'coords' line")
    coords = entries["coords"][0][1].replace(",", " ").split()
    tname = entries["time"][0][1] if entries["time"] else "t"
    chart = Chart(tuple(coords), tname)
    out = FieldFile(chart)
    if entries["vanishing"]:
        out.vanishing = entries["vanishing"][0][1].replace(",", " ").split()
    if entries["degree-bound"]:
        out.degree_bound = int(entries["degree-bound"][0][1])

    def fld(lineno, value, cls):
        try:
            comps = parse_field(value, chart.variables)
        except ParseError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
        if len(comps) != chart.dim:
            raise InputError(f"{source}:{lineno}: expected {chart.dim} components, got {len(comps)}")
        return cls(chart, comps)

    out.fields = [fld(n, v, TimeDepVectorField) for n, v in entries["field"]]
    out.generators = [fld(n, v, VectorField) for n, v in entries["generator"]]
    for lineno, value in entries["hamiltonian"]:
        try:
            out.hamiltonians.append(parse_expression(value, chart.variables))
        except ParseError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
    return out


def load_field_file(path: str | Path) -> FieldFile:
    path = Path(path)
    return parse_field_text(path.read_text(), str(path))


def darboux_space(chart: Chart) -> DarbouxSpace:
    """The Darboux space whose chart is ``chart``; coordinates must be named x,y or x1..xN,y1..yN."""
    if chart.dim % 2:
        raise InputError("a Darboux chart has even dimension")
    space = DarbouxSpace(chart.dim // 2, chart.time)
    if space.chart.coords != chart.coords:
        raise InputError(f"Darboux coordinates must be {' '.join(space.chart.coords)}")
    return space


# --- setup and problem files --------------------------------------------------


def _fields(chart: Chart, texts, what: str) -> list:
    out = []
    for s in texts or []:
        comps = parse_field(s, chart.variables)
        if len(comps) != chart.dim:
            raise InputError(f"{what}: {s!r} has {len(comps)} components, expected {chart.dim}")
        out.append(VectorField(chart, comps))
    return out


def setup_from_json(data: dict) -> DeformationSetup:
    geometry = data.get("geometry")
    vanishing = list(data.get("vanishing", []))
    bound = data.get("degree_bound")
    if geometry == "symplectic":
        space = DarbouxSpace(int(data["N"]), data.get("time", "t"))
        Y = SubspaceY.from_names(space.chart, vanishing)
        return DeformationSetup(space.chart, Y, HamiltonianSheaf(space), Perp(space),
                                name=data.get("name", f"darboux-{space.dim}"), notes={"space": space})
    if "coords" not in data:
        raise InputError("setup needs 'coords' (or geometry 'symplectic')")
    chart = Chart(tuple(data["coords"]), data.get("time", "t"))
    Y = SubspaceY.from_names(chart, vanishing)
    if geometry == "foliation":
        F = FoliationSpan(chart, _fields(chart, data.get("generators"), "generators"), bound)
        G = TangencyTwist(F) if data.get("twisted", True) else FullRestriction(F)
        return DeformationSetup(chart, Y, F, G, name=data.get("name", "foliation"))
    if geometry is not None:
        raise InputError(f"unknown geometry {geometry!r}")
    notes = {}
    sheaf = data.get("sheaf", {"kind": "full"})
    kind = sheaf.get("kind")
    if kind == "full":
        F = FullTangent(chart)
    elif kind == "constant":
        F = ConstantSpan(chart, _fields(chart, sheaf.get("generators"), "sheaf generators"))
    elif kind == "foliation":
        F = FoliationSpan(chart, _fields(chart, sheaf.get("generators"), "sheaf generators"),
                          sheaf.get("degree_bound", bound))
    elif kind == "hamiltonian":
        notes["space"] = darboux_space(chart)
        F = HamiltonianSheaf(notes["space"])
    else:
        raise InputError(f"unknown sheaf kind {kind!r}")
    obs = data.get("obstruction", {"kind": "full"})
    kind = obs.get("kind")
    if kind == "full":
        G = FullRestriction(F)
    elif kind == "explicit":
        gens = [f.components for f in _fields(chart, obs.get("generators"), "obstruction generators")]
        ideal = obs.get("ideal")
        if ideal is not None:
            ideal = [parse_expression(q, chart.variables) for q in ideal]
        G = ExplicitModule(gens, ideal, obs.get("degree_bound", bound))
    elif kind == "perp":
        G = Perp(notes.get("space") or darboux_space(chart))
    elif kind == "tangency-twist":
        if not isinstance(F, FoliationSpan):
            raise InputError("the tangency twist needs a foliation sheaf")
        G = TangencyTwist(F)
    else:
        raise InputError(f"unknown obstruction kind {kind!r}")
    return DeformationSetup(chart, Y, F, G, name=data.get("name", ""), notes=notes)


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_setup(path: str | Path) -> DeformationSetup:
    return setup_from_json(_read_json(Path(path)))


def _setup_ref(data: dict, base: Path) -> DeformationSetup:
    ref = data.get("setup")
    if ref is None:
        raise InputError("missing 'setup'")
    if isinstance(ref, str):
        return load_setup(base / ref)
    return setup_from_json(ref)


def problem_from_json(data: dict, base: Path = Path(".")) -> DeformationProblem:
    st = _setup_ref(data, base)
    seed = TimeDepVectorField(st.chart, parse_field(data["seed"], st.chart.variables))
    corrections = _fields(st.chart, data.get("corrections"), "corrections")
    return DeformationProblem(st, seed, int(data["order"]), corrections)


def load_problem(path: str | Path) -> DeformationProblem:
    path = Path(path)
    return problem_from_json(_read_json(path), path.parent)


# --- reports -------------------------------------------------------------------


@dataclass
class RunReport:
    subcommand: str
    digest: str
    results: dict
    ok: bool = True
    seconds: float | None = None

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "subcommand": self.subcommand,
            "inputs_digest": self.digest,
            "ok": self.ok,
            "results": self.results,
        }
        if self.seconds is not None:
            out["timing"] = {"seconds": round(self.seconds, 3)}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _digest(files: Sequence[str], flags: dict) -> str:
    h = hashlib.sha256()
    for f in files:
        h.update(Path(f).read_bytes())
        h.update(b"\0")
    h.update(json.dumps(flags, sort_keys=True).encode())
    return h.hexdigest()


def _texts(fields) -> list:
    return [f.to_text() for f in fields]


# --- subcommands ---------------------------------------------------------------
# Each handler returns (results, ok).


def _one_file(files, what):
    if len(files) != 1:
        raise InputError(f"{what} takes exactly one input file")
    return files[0]


def cmd_bracket(files, opts):
    ff = load_field_file(_one_file(files, "bracket"))
    A, B = ff.need_fields(2, "bracket")
    return {
        "bracket": lie_bracket(A, B).to_text(),
        "lie_D": lie_D(A, B).to_text(),
    }, True


def cmd_flow(files, opts):
    ff = load_field_file(_one_file(files, "flow"))
    (A,) = ff.need_fields(1, "flow")
    J = flow_jet(A, opts.order)
    res = {"order": opts.order, "jet": J.to_json()}
    if ff.vanishing:
        res["jet_on_Y"] = jet_restrict(J, ff.subspace).to_json()
    return res, True


def cmd_diff_formula(files, opts):
    ff = load_field_file(_one_file(files, "diff-formula"))
    A, B = ff.need_fields(2, "diff-formula")
    n, Y = opts.order, ff.subspace
    JA, JB = flow_jet(A, n + 1), flow_jet(B, n + 1)
    bad = jets_agree_on(JA, JB, Y, n)
    if bad is not None:
        raise HypothesisError(f"the {n}-jets differ on Y at order {bad}")
    gap = jet_difference(JB, JA, Y)
    formula = Y.restrict_field(difference_formula([A] * n, B))
    return {
        "order": n,
        "normalization": f"(n+1)! = {factorial(n + 1)}",
        "jet_gap": gap.to_text(),
        "formula": formula.to_text(),
        "equal": gap == formula,
    }, gap == formula


def _setup_and_fields(files, what, k):
    if len(files) != 2:
        raise InputError(f"{what} takes a setup file and a field file")
    st = load_setup(files[0])
    ff = load_field_file(files[1])
    if ff.chart.variables != st.chart.variables:
        raise InputError(f"field file chart {ff.chart.variables} differs from setup chart {st.chart.variables}")
    return st, ff.need_fields(k, what)


def cmd_admissible(files, opts):
    st, (A,) = _setup_and_fields(files, "admissible", 1)
    rep = is_admissible(A, opts.order, st.subspace, st.obstruction, st.sheaf)
    return rep.to_json(), rep.admissible


def cmd_extend(files, opts):
    st, fields = _setup_and_fields(files, "extend", 1)
    A = fields[0]
    n = opts.order
    ff = load_field_file(files[1])
    delta = VectorField(st.chart, ff.fields[1].components) if len(ff.fields) > 1 else VectorField.zero(st.chart)
    B = extend_admissible(A, delta, n, st.subspace, st.obstruction, st.sheaf)
    E = correction_field(A, delta, n)
    cong = extension_congruences(A, delta, E, n)
    rep = is_admissible(B, n + 1, st.subspace, st.obstruction, st.sheaf)
    d = jet_difference(flow_jet(B, n + 1), flow_jet(A, n + 1), st.subspace)
    ok = rep.admissible and cong.ok and d == st.subspace.restrict_field(delta)
    return {
        "order": n,
        "correction": delta.to_text(),
        "E": E.to_text(),
        "extended": B.to_text(),
        "congruences": cong.to_json(),
        "admissibility": rep.to_json(),
        "introduced_difference": d.to_text(),
    }, ok


def cmd_lift(files, opts):
    prob = load_problem(_one_file(files, "lift"))
    if opts.order is not None:
        prob = DeformationProblem(prob.setup, prob.seed, opts.order, prob.corrections)
    res = lift_to_order(prob)
    return res.to_json(), res.report.admissible


def cmd_cech(files, opts):
    path = Path(_one_file(files, "cech"))
    data = _read_json(path)
    st = _setup_ref(data, path.parent)
    n = int(opts.order if opts.order is not None else data["order"])
    charts = [TimeDepVectorField(st.chart, parse_field(s, st.chart.variables)) for s in data["charts"]]
    cd = cech_cocycle(charts, n, st)
    if data.get("splitting") is not None:
        split = [st.subspace.restrict_field(f) for f in _fields(st.chart, data["splitting"], "splitting")]
        cd = cech_glue(cd, split, st)
    return cd.to_json(), cd.invariants_hold()


def _darboux_file(files, what):
    ff = load_field_file(_one_file(files, what))
    return ff, darboux_space(ff.chart)


def cmd_ham(files, opts):
    ff, space = _darboux_file(files, "ham")
    res = {"hamiltonians": [], "fields": []}
    for H in ff.hamiltonians:
        res["hamiltonians"].append({"H": str(H), "X_H": ham_field(H, space).to_text()})
    for A in ff.fields:
        v = is_hamiltonian(A, space)
        res["fields"].append({"field": A.to_text(), **v.to_json()})
    return res, True


def cmd_extend_ham(files, opts):
    ff, space = _darboux_file(files, "extend-ham")
    (A,) = ff.need_fields(1, "extend-ham")
    Y = ff.subspace
    v = Y.restrict_field(A)
    eta, xi = contraction_forms(v, Y, space)
    G = hamiltonian_extension(v, Y, space)
    XG = ham_field(G, space)
    return {
        "on_Y": v.to_text(),
        "eta": eta.to_json(),
        "xi": xi.to_json(),
        "G": str(G),
        "X_G": XG.to_text(),
        "reproduces": Y.restrict_field(XG) == v,
    }, Y.restrict_field(XG) == v


def cmd_perp_check(files, opts):
    ff, space = _darboux_file(files, "perp-check")
    A, B = ff.need_fields(2, "perp-check")
    rep = check_bracket_perp(VectorField(ff.chart, A.components), VectorField(ff.chart, B.components),
                             ff.subspace, space)
    return rep.to_json(), rep.certificate.is_member


def cmd_omega_check(files, opts):
    ff, space = _darboux_file(files, "omega-check")
    (A,) = ff.need_fields(1, "omega-check")
    res = pullback_form_along_flow(A, opts.order, space)
    zero = all(p.is_zero() for row in res for p in row)
    return {
        "order": opts.order,
        "residual": [[str(p) for p in row] for row in res],
        "zero": zero,
    }, zero


def _foliation(ff: FieldFile, bound) -> FoliationSpan:
    if not ff.generators:
        raise InputError("a foliation needs at least one 'generator' line")
    return FoliationSpan(ff.chart, ff.generators, bound if bound is not None else ff.degree_bound)


def cmd_tangency(files, opts):
    ff = load_field_file(_one_file(files, "tangency"))
    ideal = tangency_ideal(_foliation(ff, opts.degree_bound), ff.subspace)
    return {"tangency_ideal": ideal.to_json()["generators"], "unit": ideal.is_unit,
            "zero": ideal.is_zero}, True


def cmd_fol_check(files, opts):
    ff = load_field_file(_one_file(files, "fol-check"))
    A, B = ff.need_fields(2, "fol-check")
    rep = check_foliation_bracket(VectorField(ff.chart, A.components), VectorField(ff.chart, B.components),
                                  ff.subspace, _foliation(ff, opts.degree_bound), seed=opts.seed)
    return rep.to_json(), rep.ok


def cmd_velocity_check(files, opts):
    ff = load_field_file(_one_file(files, "velocity-check"))
    (A,) = ff.need_fields(1, "velocity-check")
    rep = velocity_in_foliation(A, opts.order, _foliation(ff, opts.degree_bound))
    return rep.to_json(), rep.ok


def cmd_verify_paper(files, opts):
    from .verification import CRITERIA, run_suite

    if files:
        raise InputError("verify-paper takes no input files")
    results = run_suite(opts.seed, opts.cases, opts.jobs)
    checks = [r.to_json(timing=opts.timing) for r in results]
    crit = {}
    for c in CRITERIA:
        rs = [r for r in results if r.criterion == c]
        crit[c] = all(r.ok for r in rs)
    inv = all(r.ok for r in results if r.criterion == "invariant")
    return {
        "seed": opts.seed,
        "checks": checks,
        "criteria": crit,
        "invariants": inv,
        "failures": sum(len(r.failures) for r in results),
        "inconclusive": sum(r.inconclusive for r in results),
    }, all(r.ok for r in results)


COMMANDS = {
    "bracket": (cmd_bracket, "Lie bracket [A,B] and D(A)-derivative of two fields"),
    "flow": (cmd_flow, "flow jet of a time-dependent field"),
    "diff-formula": (cmd_diff_formula, "jet gap of two fields with equal n-jets vs the bracket formula"),
    "admissible": (cmd_admissible, "n-admissibility report (setup file, field file)"),
    "extend": (cmd_extend, "raise an n-admissible field by one order (setup file, field file)"),
    "lift": (cmd_lift, "lift a problem file to its target order"),
    "cech": (cmd_cech, "cocycle of chart differences and optional gluing"),
    "ham": (cmd_ham, "Hamiltonian fields and Hamiltonian verdicts on a Darboux chart"),
    "extend-ham": (cmd_extend_ham, "Hamiltonian extension of a field along Y"),
    "perp-check": (cmd_perp_check, "bracket of two Hamiltonian fields agreeing on Y lands in Perp"),
    "omega-check": (cmd_omega_check, "pullback of omega along the flow, modulo t^(n+1)"),
    "tangency": (cmd_tangency, "tangency ideal of a foliation along Y"),
    "fol-check": (cmd_fol_check, "bracket of two foliation fields agreeing on Y"),
    "velocity-check": (cmd_velocity_check, "flow velocity as a combination of the generators"),
    "verify-paper": (cmd_verify_paper, "run the full randomized property suite"),
}

_DEFAULT_ORDER = {"flow": 3, "diff-formula": 1, "admissible": 1, "extend": 1, "omega-check": 4,
                  "velocity-check": 4}


def run(subcommand: str, files: Sequence[str] = (), **flags) -> RunReport:
    """Dispatch one subcommand; ``flags`` mirror the command-line options."""
    if subcommand not in COMMANDS:
        raise InputError(f"unknown subcommand {subcommand!r}")
    opts = argparse.Namespace(order=None, seed=0, cases=None, degree_bound=None, jobs=1, timing=False)
    for k, v in flags.items():
        setattr(opts, k, v)
    if opts.order is None and subcommand in _DEFAULT_ORDER:
        opts.order = _DEFAULT_ORDER[subcommand]
    handler = COMMANDS[subcommand][0]
    digest_flags = {k: getattr(opts, k) for k in ("order", "seed", "cases", "degree_bound")}
    t0 = time.perf_counter()
    results, ok = handler(list(files), opts)
    seconds = time.perf_counter() - t0 if opts.timing else None
    return RunReport(subcommand, _digest(files, digest_flags), results, ok, seconds)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jetlift", description="Exact jet calculus workbench.")
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("files", nargs="*")
        sp.add_argument("--order", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cases", type=int)
        sp.add_argument("--degree-bound", type=int)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--json", metavar="OUT", help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: getattr(args, k) for k in ("order", "seed", "cases", "degree_bound", "jobs", "timing")}
    try:
        report = run(args.subcommand, args.files, **flags)
    except (InputError, ParseError, HypothesisError, OSError, KeyError, ValueError) as exc:
        print(f"jetlift {args.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = report.dumps()
    if args.json:
        Path(args.json).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
