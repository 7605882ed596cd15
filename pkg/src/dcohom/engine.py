"""Command dispatch and result documents.

Every command produces a ResultDocument whose JSON form is deterministic and
versioned; witnesses are re-verified before emission (potentials are
differentiated again, derivations constraint-checked) so the output is a
certificate, not a claim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catalog import CATALOG
from .errors import NotStabilized, RouteMismatch, UnsupportedSpace
from .forms import de_rham_d, dr_cohomology_dims, kunneth_dr
from .grammar import (
    parse_form,
    parse_space,
    render_form,
    render_operator,
    render_space,
)
from .hochschild import c1_derivation, is_inner_within, solve_derivations
from .koszul import (
    hh_homology_via_koszul,
    hh_via_de_rham,
    hh_via_koszul,
    koszul_resolution_check,
    vdb_check,
)
from .operators import Filtration, center_operators
from .spaces import SpaceSpec

COMMANDS = (
    "dr",
    "hh",
    "hhom",
    "vdb",
    "kunneth",
    "center",
    "outer",
    "deform",
    "resolution-check",
)

SCHEMA_VERSION = 1


@dataclass
class ResultDocument:
    command: str
    space: str
    dims: dict[str, list[int]] = field(default_factory=dict)
    stabilized: list[bool] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)
    status: str = "ok"

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "space": self.space,
            "dims": {route: list(v) for route, v in self.dims.items()},
            "stabilized": list(self.stabilized),
            "witnesses": [dict(w) for w in self.witnesses],
            "status": self.status,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ResultDocument":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported schema version")
        return ResultDocument(
            command=data["command"],
            space=data["space"],
            dims={k: list(v) for k, v in data["dims"].items()},
            stabilized=list(data["stabilized"]),
            witnesses=[dict(w) for w in data["witnesses"]],
            status=data["status"],
        )

    @property
    def ok(self) -> bool:
        return self.status == "ok" and all(self.stabilized)


def emit(doc: ResultDocument, as_json: bool) -> bytes:
    """Stable rendering: versioned JSON or a plain-text table."""
    if as_json:
        return (json.dumps(doc.to_json_dict(), indent=2) + "\n").encode()
    lines = [f"command: {doc.command}", f"space:   {doc.space}"]
    for route, dims in doc.dims.items():
        lines.append(f"  {route:12s} {list(dims)}")
    if doc.stabilized:
        lines.append(f"stabilized: {['yes' if s else 'NO' for s in doc.stabilized]}")
    for w in doc.witnesses:
        lines.append(f"witness [{w['kind']}]: {w['expr']}")
    lines.append(f"status: {doc.status}")
    return ("\n".join(lines) + "\n").encode()


def _flat_or_raise(spec: SpaceSpec) -> SpaceSpec:
    flat = spec.flatten()
    if flat is None:
        raise UnsupportedSpace("this command needs a space that flattens to one atomic spec")
    return flat


def _with_escalation(fn, window: int):
    """Run at the requested window; escalate once to window+2 before failing."""
    try:
        return fn(window)
    except NotStabilized:
        return fn(window + 2)


def run_command(
    command: str,
    spec: SpaceSpec,
    window: int = 6,
    omega: str | None = None,
    lam: str | None = None,
) -> ResultDocument:
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    doc = ResultDocument(command=command, space=render_space(spec))
    handler = _HANDLERS[command]
    handler(doc, spec, window, omega, lam)
    return doc


def _cmd_dr(doc, spec, window, omega, lam):
    dims = dr_cohomology_dims(spec, window)
    doc.dims["de-rham"] = dims
    doc.stabilized = [True] * len(dims)


def _cmd_hh(doc, spec, window, omega, lam):
    def attempt(w):
        report = hh_via_koszul(spec, Filtration(w, w))
        return report

    report = _with_escalation(attempt, window)
    dr = hh_via_de_rham(spec, window)
    doc.dims["koszul"] = list(report.dims)
    doc.dims["de-rham"] = list(dr)
    doc.stabilized = list(report.stabilized)
    padded = list(dr) + [0] * (len(report.dims) - len(dr))
    if padded != list(report.dims):
        doc.status = "fail: routes disagree"
        raise RouteMismatch(
            f"koszul dims {list(report.dims)} != de Rham dims {padded}"
        )


def _cmd_hhom(doc, spec, window, omega, lam):
    def attempt(w):
        return hh_homology_via_koszul(spec, Filtration(w, w))

    report = _with_escalation(attempt, window)
    doc.dims["koszul-homology"] = list(report.dims)
    doc.stabilized = list(report.stabilized)
    if report.dims[0] == 0:
        doc.witnesses.append({"kind": "note", "expr": "HH_0 = 0"})


def _cmd_vdb(doc, spec, window, omega, lam):
    def attempt(w):
        wf = Filtration(w, w)
        return hh_via_koszul(spec, wf), hh_homology_via_koszul(spec, wf), vdb_check(spec, wf)

    coh, hom, ok = _with_escalation(attempt, window)
    doc.dims["koszul"] = list(coh.dims)
    doc.dims["koszul-homology"] = list(hom.dims)
    doc.stabilized = [a and b for a, b in zip(coh.stabilized, hom.stabilized)]
    if not ok:
        doc.status = "fail: duality violated"
        raise RouteMismatch("HH^n and HH_{2r-n} dimensions disagree")
    doc.witnesses.append({"kind": "note", "expr": "HH^n = HH_{2r-n} for all n"})


def _cmd_kunneth(doc, spec, window, omega, lam):
    if spec.is_atomic:
        doc.dims["de-rham"] = dr_cohomology_dims(spec, window)
        doc.stabilized = [True] * len(doc.dims["de-rham"])
        return
    dims = [1]
    for i, factor in enumerate(spec.factors):
        fd = dr_cohomology_dims(factor, window)
        doc.dims[f"factor{i}"] = fd
        dims = kunneth_dr(dims, fd)
    doc.dims["kunneth"] = dims
    flat = spec.flatten()
    if flat is not None:
        direct = dr_cohomology_dims(flat, window)
        doc.dims["direct"] = direct
        if direct != dims:
            doc.status = "fail: routes disagree"
            raise RouteMismatch(f"Künneth dims {dims} != direct dims {direct}")
    doc.stabilized = [True] * len(dims)


def _cmd_center(doc, spec, window, omega, lam):
    flat = _flat_or_raise(spec)
    ops = center_operators(flat, Filtration(window, window))
    doc.dims["center"] = [len(ops)]
    doc.stabilized = [True]
    for op in ops:
        doc.witnesses.append({"kind": "operator", "expr": render_operator(op)})


def _cmd_outer(doc, spec, window, omega, lam):
    flat = _flat_or_raise(spec)

    def attempt(w):
        return solve_derivations(flat, Filtration(w, w))

    der, inner, outer = _with_escalation(attempt, window)
    doc.dims["derivations"] = [der.dim()]
    doc.dims["inner"] = [inner.dim()]
    doc.dims["outer"] = [outer]
    doc.stabilized = [True]
    if lam:
        form = parse_form(flat, lam)
        d = c1_derivation(form)
        inner_flag = is_inner_within(d, Filtration(window, window))
        images = ", ".join(
            f"d({'x' if g[0] == 'x' else 'd'}{g[1] + 1}) = {render_operator(op)}"
            for g, op in d.images
            if not op.is_zero
        ) or "0"
        doc.witnesses.append({"kind": "derivation", "expr": images})
        doc.witnesses.append(
            {"kind": "note", "expr": f"c1(lambda) is {'inner' if inner_flag else 'outer'} at bound {window}"}
        )


def _cmd_deform(doc, spec, window, omega, lam):
    from .deformations import trivialize_deformation, verify_singular_extension

    flat = _flat_or_raise(spec)
    if not omega:
        raise ValueError("deform needs --omega")
    form = parse_form(flat, omega)
    bound = Filtration(min(window, 3), min(window, 3))
    verify_singular_extension(flat, form, bound)
    outcome = trivialize_deformation(flat, form, bound)
    doc.stabilized = [True]
    doc.dims["class-nonzero"] = [0 if outcome.trivial else 1]
    if outcome.trivial:
        beta = outcome.witness_potential
        if de_rham_d(beta) != form:
            raise RouteMismatch("re-verification of the potential failed")
        doc.witnesses.append({"kind": "potential", "expr": render_form(beta)})
        doc.witnesses.append({"kind": "note", "expr": "deformation is trivial"})
    else:
        cert = outcome.certificate
        doc.witnesses.append({"kind": "certificate", "expr": cert.reason})
        doc.witnesses.append(
            {"kind": "residual", "expr": render_form(cert.residual)}
        )
        doc.witnesses.append({"kind": "note", "expr": "deformation is non-trivial"})


def _cmd_resolution_check(doc, spec, window, omega, lam):
    w = Filtration(min(window, 3), min(window, 3))
    ok = koszul_resolution_check(spec, w)
    doc.dims["exactness-defects"] = [0 if ok else 1]
    doc.stabilized = [True]
    if not ok:
        doc.status = "fail: resolution not exact in the window"


_HANDLERS = {
    "dr": _cmd_dr,
    "hh": _cmd_hh,
    "hhom": _cmd_hhom,
    "vdb": _cmd_vdb,
    "kunneth": _cmd_kunneth,
    "center": _cmd_center,
    "outer": _cmd_outer,
    "deform": _cmd_deform,
    "resolution-check": _cmd_resolution_check,
}


def catalog_documents() -> list[dict]:
    return [
        {
            "name": entry.name,
            "space": render_space(entry.spec),
            "expected": list(entry.expected) if entry.expected else None,
        }
        for entry in CATALOG
    ]


def parse_space_expr(expr: str) -> SpaceSpec:
    return parse_space(expr)
