from dataclasses import dataclass, field

import numpy as np

from .constants import DETECTION_TOL

__all__ = ["CriterionReport"]


def _plain(value):
    """Turn numpy scalars/arrays into JSON-friendly Python objects."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


@dataclass
class CriterionReport:
    """Outcome of evaluating one separability inequality on one state.

    ``violation`` is always oriented so that a positive number means the
    separability bound is broken: ``lhs - rhs`` for upper-bound criteria
    (trace-norm tests) and ``rhs - lhs`` for the variance lower bounds
    (Duan, Mancini, TLUR).  ``detected`` holds exactly when
    ``status == "ok"`` and ``violation > tol``.
    """

    criterion: str
    lhs: float
    rhs: float
    violation: float
    detected: bool
    parameters: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    status: str = "ok"

    @classmethod
    def evaluate(cls, criterion, lhs, rhs, violation, tol=DETECTION_TOL,
                 parameters=None, details=None, status="ok"):
        lhs, rhs, violation = float(lhs), float(rhs), float(violation)
        detected = status == "ok" and violation > tol
        return cls(criterion, lhs, rhs, violation, bool(detected),
                   dict(parameters or {}), dict(details or {}), status)

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violation": self.violation,
            "detected": self.detected,
            "status": self.status,
            "parameters": _plain(self.parameters),
            "details": _plain(self.details),
        }

    def to_tsv(self):
        """Tab-separated ``key<TAB>value`` lines, one per field."""
        lines = [
            f"criterion\t{self.criterion}",
            f"status\t{self.status}",
            f"lhs\t{self.lhs!r}",
            f"rhs\t{self.rhs!r}",
            f"violation\t{self.violation!r}",
            f"detected\t{int(self.detected)}",
        ]
        for key, value in self.details.items():
            lines.append(f"{key}\t{_format(value)}")
        for key, value in self.parameters.items():
            lines.append(f"param.{key}\t{_format(value)}")
        return "\n".join(lines)


def _format(value):
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(_format(v) for v in value)
    return str(value)
