"""Tabular reports, CSV/JSON-lines rendering and run configurations."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .equidist import DiscrepancyReport
from .errors import DomainError

DISCREPANCY_COLUMNS = ("q", "count", "main_term_num", "main_term_den", "discrepancy_float", "weight")
FORMATS = ("csv", "jsonl")


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, int, float)) or v is None:
        return v
    return str(v)


def discrepancy_table(report: DiscrepancyReport) -> Table:
    rows = []
    for r in report.rows:
        main = Fraction(r.main_term)
        rows.append((r.q, r.count, main.numerator, main.denominator, float(r.discrepancy), r.weight))
    return Table(DISCREPANCY_COLUMNS, rows)


def emit_report(report, fmt: str = "csv") -> bytes:
    """Deterministic bytes for a :class:`Table` or :class:`DiscrepancyReport`."""
    if fmt not in FORMATS:
        raise DomainError(f"format must be one of {FORMATS}")
    table = discrepancy_table(report) if isinstance(report, DiscrepancyReport) else report
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue().encode("utf-8")
    lines = [
        json.dumps({c: _json_cell(v) for c, v in zip(table.columns, row)}, sort_keys=False)
        for row in table.rows
    ]
    return "".join(line + "\n" for line in lines).encode("utf-8")


# --------------------------------------------------------------------------
# run configuration


RUN_KEYS = ("command", "seed", "workers", "format", "output")


@dataclass
class RunConfig:
    """A command plus its parameters, stored as flat ``section.key=value`` text.

    Sections: ``run`` (command, seed, workers, format, output) and ``cmd``
    (command flags, values kept as the strings given on the command line).
    """

    command: str
    params: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    workers: int = 1
    format: str = "csv"
    output: str | None = None

    def to_text(self) -> str:
        lines = [f"run.command={self.command}", f"run.seed={self.seed}",
                 f"run.workers={self.workers}", f"run.format={self.format}"]
        if self.output is not None:
            lines.append(f"run.output={self.output}")
        for k in sorted(self.params):
            lines.append(f"cmd.{k}={self.params[k]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        run: dict[str, str] = {}
        params: dict[str, str] = {}
        for num, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config line {num}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            section, _, name = key.partition(".")
            if section == "run" and name in RUN_KEYS:
                run[name] = value
            elif section == "cmd" and name:
                params[name] = value
            else:
                raise DomainError(f"config line {num}: unknown key {key!r}")
        if "command" not in run:
            raise DomainError("config lacks run.command")
        return cls(run["command"], params, int(run.get("seed", 0)), int(run.get("workers", 1)),
                   run.get("format", "csv"), run.get("output"))

    def to_argv(self) -> list[str]:
        argv = [self.command, "--seed", str(self.seed), "--workers", str(self.workers),
                "--format", self.format]
        if self.output is not None:
            argv += ["--output", self.output]
        for k in sorted(self.params):
            flag = "--" + k.replace("_", "-")
            v = self.params[k]
            if v == "true":
                argv.append(flag)
            elif v == "false":
                continue
            else:
                for item in v.split(",") if k in MULTI_VALUE else [v]:
                    argv += [flag, item]
        return argv


MULTI_VALUE = {"nu"}
