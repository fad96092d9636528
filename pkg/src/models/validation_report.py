from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class ValidationReport:
    confinement: bool
    connectivity: bool
    photon_counts: bool
    detailed_balance: bool
    thermal_consistency: bool = True
    n: Dict[str, int] = field(default_factory=dict)
    negative_temperature: List[str] = field(default_factory=list)
    messages: List[str] = field(default_factory=list)
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(
            (
                self.confinement,
                self.connectivity,
                self.photon_counts,
                self.detailed_balance,
                self.thermal_consistency,
            )
        )

    def failures(self) -> List[str]:
        checks = {
            "confinement": self.confinement,
            "connectivity": self.connectivity,
            "photon_counts": self.photon_counts,
            "detailed_balance": self.detailed_balance,
            "thermal_consistency": self.thermal_consistency,
        }
        return [name for name, ok in checks.items() if not ok]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ValidationReport":
        data = {k: v for k, v in data.items() if k != "passed"}
        return cls(**data)

    def summary(self) -> Optional[str]:
        if self.passed:
            return None
        return f"failed checks: {', '.join(self.failures())}; " + "; ".join(self.messages)
