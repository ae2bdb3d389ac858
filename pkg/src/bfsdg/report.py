"""Pass/fail records shared by every verifier."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: str | None = None

    def line(self):
        tail = f"  [{self.witness}]" if self.witness else ""
        return f"{'pass' if self.passed else 'FAIL'}  {self.name}{tail}"

    def to_dict(self):
        return asdict(self)


def all_passed(checks):
    return all(c.passed for c in checks)


def failures(checks):
    return [c for c in checks if not c.passed]


def first_nonzero(mat):
    """Witness text for the first nonzero entry of a matrix, or None."""
    for i, row in enumerate(mat.entries):
        for j, v in enumerate(row):
            if v:
                return f"entry ({i},{j}) = {v}"
    return None
