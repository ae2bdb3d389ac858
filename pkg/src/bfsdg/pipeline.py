"""Orchestration: instance -> alpha, beta -> B -> c -> h -> X -> F, with reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bfs_core.comparison import build_alpha, build_beta
from .bfs_core.homotopy import build_c, solve_homotopy
from .bfs_core.structure import Ingredients, assemble, compute_h0_ideal, pretty_entry, slots_of, verify_F
from .bfs_core.tate import build_tate_B
from .bfs_core.xmaps import extract_X
from .multialg import DgAlgebra, verify_dga
from .report import Check, all_passed

CORRUPTIONS = ("f2", "p11", "gamma2")


@dataclass
class Stages:
    spec: object
    data: object = None
    B: object = None
    c: object = None
    hres: object = None
    xmaps: object = None
    checks: dict = field(default_factory=dict)

    def ingredients(self, r=None):
        return Ingredients.from_pipeline(self.data, self.xmaps, self.spec.r if r is None else r)


def corrupt_gamma2(M):
    """Copy of M with the divided square of one basis element negated."""
    divided = {e: dict(tab) for e, tab in M.divided.items()}
    for e in sorted(divided):
        for s in sorted(divided[e]):
            vec = divided[e][s]
            if any(vec):
                divided[e][s] = [-x for x in vec]
                return DgAlgebra(M.complex, M.products, divided, M.orientation, M.name), (e, s)
    raise ValueError("every divided square of the input is zero; nothing to corrupt")


def prepare(spec, oracle=True):
    """Run every stage up to X; each stage's checks are kept under its name."""
    st = Stages(spec)
    st.checks["input"] = verify_dga(spec.M)
    data = build_alpha(spec.M, spec.sequence, spec.splitting)
    build_beta(data)
    st.data = data
    st.checks["alpha and beta"] = list(data.checks)
    st.B = build_tate_B(spec.M)
    st.checks["Tate complex B"] = [Check("B: d o d = 0", True, f"ranks {[st.B.rank(i) for i in range(6)]}")]
    st.c, st.checks["morphism c"] = build_c(data, st.B)
    st.hres = solve_homotopy(data, st.B, st.c, oracle=oracle)
    st.checks["homotopy h"] = list(st.hres.checks)
    st.xmaps, st.checks["X and X^t"] = extract_X(data, st.B, st.hres)
    return st


def _corrupt_F(F, what):
    if what == "f2":
        mat = F.d(2)
        for r, c, val in mat.nonzero_entries():
            mat.entries[r][c] = -val
            return f"f2 entry ({r},{c}) negated"
    if what == "p11":
        tab = F.products[(1, 1)]
        for st in sorted(tab):
            vec = tab[st]
            for k, a in enumerate(vec):
                if a:
                    tab[st] = vec[:k] + [-a] + vec[k + 1 :]
                    return f"(1,1) product of basis pair {st}, component {k} negated"
    raise ValueError(f"unknown corruption {what!r}")


@dataclass
class Report:
    instance: str
    r: str
    calibration_mode: str
    stages: dict
    calibration_log: list
    golden: dict
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(all_passed(chs) for chs in self.stages.values())

    def to_dict(self):
        return {
            "instance": self.instance,
            "r": self.r,
            "calibration_mode": self.calibration_mode,
            "passed": self.passed,
            "notes": self.notes,
            "stages": {k: [c.to_dict() for c in v] for k, v in self.stages.items()},
            "calibration_log": self.calibration_log,
            "golden": self.golden,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lines = [f"instance {self.instance}, r = {self.r}, calibration {self.calibration_mode}"]
        lines.extend(f"note: {n}" for n in self.notes)
        for stage, checks in self.stages.items():
            lines.append(f"== {stage}")
            lines.extend(c.line() for c in checks)
        if self.calibration_log:
            lines.append("== calibration repairs")
            for rep in self.calibration_log:
                lines.append(f"{rep['entry']} term {rep['term']}: {rep['kind']}: {rep['printed']} -> {rep['replacement']}")
        lines.append("RESULT: " + ("all checks pass" if self.passed else "FAILURES"))
        return "\n".join(lines) + "\n"


def _mat_strs(m):
    return m.to_strings()


def run_bfs(spec, r=None, calibration="full", corrupt=None, oracle=True):
    """Full pipeline and verification; returns (Report, F)."""
    from .bfs_core.calibrate import calibrate

    notes = []
    if corrupt == "gamma2":
        M, where = corrupt_gamma2(spec.M)
        notes.append(f"corruption: divided square of basis element {where[1]} in degree {where[0]} negated")
        spec = type(spec)(spec.ring, M, spec.sequence, spec.splitting, spec.r, spec.options, spec.name)
    st = prepare(spec, oracle=oracle)
    r = spec.r if r is None else r
    cal = calibrate(calibration)
    F = assemble(cal.reading, st.ingredients(r))
    if corrupt in ("f2", "p11"):
        notes.append("corruption: " + _corrupt_F(F, corrupt))
    stages = dict(st.checks)
    stages["F(alpha, r)"] = verify_F(F, seed=spec.options.get("seed", 0))
    golden = {
        "beta": {str(i): _mat_strs(st.data.beta[i]) for i in range(1, 5)},
        "X": _mat_strs(st.xmaps.X),
        "Xt": _mat_strs(st.xmaps.Xt),
        "f": {str(i): _mat_strs(F.d(i)) for i in range(1, 5)},
        "h0_ideal": [str(g) for g in compute_h0_ideal(F)],
        "reading": {
            "/".join(map(str, k)): pretty_entry(e, slots_of(k)) for k, e in sorted(cal.reading.items())
        },
    }
    rep = Report(spec.name, str(r), calibration, stages, cal.log, golden, notes)
    return rep, F
