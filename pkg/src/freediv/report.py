"""Small pass/fail check reports shared by the construction modules and CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


class CheckFailure(Exception):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def require(self) -> "CheckReport":
        if not self.ok:
            bad = "; ".join(f"{c.name} ({c.detail})" for c in self.checks if not c.passed)
            raise CheckFailure(f"{self.title}: {bad}")
        return self

    def render(self) -> str:
        lines = [f"== {self.title} =="]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            suffix = f"  [{c.detail}]" if c.detail else ""
            lines.append(f"  {mark}  {c.name}{suffix}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
        }
