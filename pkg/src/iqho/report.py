"""Verification records shared by the checks, the CLI and the acceptance suite."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np

FIELDS = ("quantity", "params", "closed_form", "oracle", "abs_err", "rel_err", "tol", "pass")


def format_complex(z: complex) -> str:
    """'re+imi' with repr-exact components, e.g. '1.0-2.5i'."""
    z = complex(z)
    re, im = _fmt_real(z.real), _fmt_real(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}i"


def _fmt_real(x: float) -> str:
    return repr(float(x))


def to_jsonable(v: Any) -> Any:
    """Recursively convert numpy/complex values; complex -> 're+imi', inf/nan -> str."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (complex, np.complexfloating)):
        return format_complex(v)
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [to_jsonable(x) for x in v.tolist()]
    if v is None or isinstance(v, str):
        return v
    return str(v)


def to_cell(v: Any) -> str:
    """Scalar rendering for CSV cells."""
    v = to_jsonable(v)
    if isinstance(v, dict):
        return ";".join(f"{k}={to_cell(x)}" for k, x in v.items())
    if isinstance(v, list):
        return "[" + " ".join(to_cell(x) for x in v) + "]"
    if v is None:
        return ""
    return str(v)


@dataclass
class ReportRow:
    """One compared quantity; ``oracle`` is the independently computed value."""

    quantity: str
    params: dict
    closed_form: Any
    oracle: Any
    abs_err: float
    rel_err: float
    tol: float
    passed: bool

    @classmethod
    def compare(cls, quantity: str, params: dict, closed_form, oracle, tol: float,
                relative: bool = False, abs_err: float | None = None) -> "ReportRow":
        """Row with errors derived from the two values; passes on abs (or rel) error <= tol."""
        if abs_err is None:
            abs_err = float(abs(complex(closed_form) - complex(oracle)))
        scale = max(abs(complex(closed_form)), abs(complex(oracle)))
        rel_err = abs_err / scale if scale > 0 else (0.0 if abs_err == 0 else math.inf)
        err = rel_err if relative else abs_err
        return cls(quantity, dict(params), closed_form, oracle, abs_err, rel_err, tol,
                   bool(err <= tol))

    @classmethod
    def flag(cls, quantity: str, params: dict, value, ok: bool, tol: float = 0.0) -> "ReportRow":
        """Row for a yes/no property; ``value`` is the measured statistic."""
        return cls(quantity, dict(params), value, value, 0.0, 0.0, tol, bool(ok))

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "params": to_jsonable(self.params),
            "closed_form": to_jsonable(self.closed_form),
            "oracle": to_jsonable(self.oracle),
            "abs_err": to_jsonable(self.abs_err),
            "rel_err": to_jsonable(self.rel_err),
            "tol": to_jsonable(self.tol),
            "pass": bool(self.passed),
        }


@dataclass
class Report:
    title: str
    rows: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def max_abs_err(self) -> float:
        return max((r.abs_err for r in self.rows), default=0.0)

    def add(self, row: ReportRow) -> ReportRow:
        self.rows.append(row)
        return row

    def extend(self, other: "Report") -> "Report":
        self.rows.extend(other.rows)
        return self

    def failures(self) -> list:
        return [r for r in self.rows if not r.passed]

    def as_dict(self) -> dict:
        return {"title": self.title, "rows": [r.as_dict() for r in self.rows],
                "data": to_jsonable(self.data), "pass": self.passed}

    def __str__(self) -> str:
        bad = len(self.failures())
        return f"{self.title}: {len(self.rows)} rows, {bad} failed"


def load_schema() -> dict:
    """JSON schema for the CLI's ``{meta, rows}`` document."""
    text = resources.files("iqho").joinpath("report_schema.json").read_text()
    return json.loads(text)


__all__ = ["FIELDS", "Report", "ReportRow", "format_complex", "to_jsonable", "to_cell",
           "load_schema"]
