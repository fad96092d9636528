from dataclasses import fields
from typing import Any, Dict

import numpy as np


def to_native(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: to_native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_native(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


class ReportMixin:
    """JSON codec shared by the report dataclasses.

    Subclasses list their vector-valued fields in ``_arrays`` and nested
    report fields in ``_nested``; everything else is stored as-is.
    """

    _arrays: tuple = ()
    _nested: Dict[str, type] = {}

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: to_native(getattr(self, f.name)) for f in fields(self) if f.init}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]):
        kwargs = {}
        for f in fields(cls):
            if not f.init or f.name not in data:
                continue
            value = data[f.name]
            if value is not None and f.name in cls._arrays:
                value = np.asarray(value, dtype=float)
            elif value is not None and f.name in cls._nested:
                value = cls._nested[f.name].from_dict(value)
            kwargs[f.name] = value
        return cls(**kwargs)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.to_dict() == other.to_dict()
