from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..core.errors import ConfigError
from ..core.settings import CHI_MAX
from .model_spec import ModelSpec

COMMANDS = ("validate", "steady", "tur", "oracle", "sweep", "optimize")
FORMATS = ("json", "csv")

_FIELDS = {
    "command", "family", "params", "model_spec", "output", "format", "seed",
    "reservoir", "chi_max", "chi_num", "spec",
}
_SPEC_FIELDS = {"family", "fixed", "free", "grid", "seed", "starts"}


@dataclass
class SearchSpec:
    """Grid or optimization request over one model family."""

    family: str
    fixed: Dict[str, float] = field(default_factory=dict)
    free: List[Dict[str, Any]] = field(default_factory=list)
    grid: List[Dict[str, Any]] = field(default_factory=list)
    seed: int = 0
    starts: Optional[int] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SearchSpec":
        unknown = set(data) - _SPEC_FIELDS
        if unknown:
            raise ConfigError(f"Unknown search spec fields: {sorted(unknown)}")
        if not data.get("family"):
            raise ConfigError("Search spec needs a family")
        for item in data.get("free", []):
            if not {"name", "min", "max"} <= set(item):
                raise ConfigError(f"Free parameter entries need name, min and max: {item}")
        for axis in data.get("grid", []):
            if "name" not in axis:
                raise ConfigError(f"Grid axes need a name: {axis}")
        return cls(
            family=data["family"],
            fixed={k: float(v) for k, v in data.get("fixed", {}).items()},
            free=list(data.get("free", [])),
            grid=list(data.get("grid", [])),
            seed=int(data.get("seed", 0)),
            starts=data.get("starts"),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {"family": self.family, "fixed": self.fixed, "free": self.free, "grid": self.grid, "seed": self.seed}
        if self.starts is not None:
            data["starts"] = self.starts
        return data


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    params: Dict[str, float] = field(default_factory=dict)
    model_spec: Optional[ModelSpec] = None
    output: Optional[str] = None
    format: str = "json"
    seed: int = 0
    reservoir: Optional[str] = None
    chi_max: float = CHI_MAX
    chi_num: int = 41
    spec: Optional[SearchSpec] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command {self.command!r}; choose from {list(COMMANDS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"Unknown output format {self.format!r}")
        if self.command in ("sweep", "optimize"):
            if self.spec is None:
                if self.family is None:
                    raise ConfigError(f"{self.command} needs a search spec or a model family")
                self.spec = SearchSpec(family=self.family, fixed=dict(self.params), seed=self.seed)
            if self.command == "sweep" and not self.spec.grid:
                raise ConfigError("sweep needs at least one grid axis")
            if self.command == "optimize" and not self.spec.free:
                raise ConfigError("optimize needs at least one free parameter")
        elif self.model_spec is None and self.family is None:
            raise ConfigError(f"{self.command} needs --model or an inline model_spec")
        if self.command == "oracle" and self.chi_num < 2:
            raise ConfigError("oracle needs at least two chi samples")
        if not 0.0 < self.chi_max <= CHI_MAX:
            raise ConfigError(f"chi_max must lie in (0, {CHI_MAX}], got {self.chi_max}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        unknown = set(data) - _FIELDS
        if unknown:
            raise ConfigError(f"Unknown config fields: {sorted(unknown)}")
        if "command" not in data:
            raise ConfigError("Config needs a command")
        kwargs = dict(data)
        try:
            if kwargs.get("model_spec") is not None:
                kwargs["model_spec"] = ModelSpec.from_dict(kwargs["model_spec"])
            kwargs["params"] = {k: float(v) for k, v in kwargs.get("params", {}).items()}
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed model in config: {e!r}") from e
        if kwargs.get("spec") is not None:
            kwargs["spec"] = SearchSpec.from_dict(kwargs["spec"])
        return cls(**kwargs)
