"""Verdict records shared by the closed-form and matrix checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any


@dataclass(frozen=True)
class PropertyReport:
    verdict: bool
    property_name: str
    witness: dict[str, Any] | None
    tolerance_used: float
    applicable: bool = True
    note: str = ""

    def __post_init__(self):
        if not self.verdict and self.witness is None:
            raise ValueError("a negative verdict needs a witness")

    def __bool__(self) -> bool:
        return self.verdict

    @classmethod
    def not_applicable(cls, name: str, reason: str, tol: float) -> "PropertyReport":
        return cls(False, name, {"reason": reason}, tol, applicable=False, note=reason)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
