"""Config, roster and rule-table file formats."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path

from .audit import RuleTable, Universe, canonical_key
from .choice import PriorityRanking, Student
from .errors import InputError
from .majorization import BiasSpec, derive_bias, parse_rational

ROSTER_HEADER = ["student_id", "type", "priority_score"]
CAPS_ENV = "SCHURCHOICE_CAPS"

_DEFAULT_CAPS = {
    "frontier": 50_000,
    "budget": 1_000_000,
    "universe": 12,
    "bases": 1_000_000,
}


@dataclass(frozen=True)
class RunConfig:
    n: int
    capacity: int
    ideal_ratio: tuple[Fraction, ...]
    tie_break: str = "reject"
    caps: dict = field(default_factory=lambda: dict(_DEFAULT_CAPS))
    format: str = "json"

    @property
    def bias(self) -> BiasSpec:
        return derive_bias(self.ideal_ratio)


def _positive_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InputError(f"{what} must be a positive integer, got {value!r}")
    return value


def _env_caps() -> dict:
    raw = os.environ.get(CAPS_ENV, "").strip()
    caps = {}
    if not raw:
        return caps
    for item in raw.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _DEFAULT_CAPS:
            raise InputError(f"bad {CAPS_ENV} entry {item!r}; keys are {sorted(_DEFAULT_CAPS)}")
        try:
            caps[key] = _positive_int(int(value), f"cap {key}")
        except ValueError:
            raise InputError(f"bad {CAPS_ENV} value {value!r} for {key}") from None
    return caps


def make_config(data: dict) -> RunConfig:
    """Validate a config mapping; caps from the environment override the file."""
    try:
        n = _positive_int(data["n"], "n")
        capacity = _positive_int(data["capacity"], "capacity")
    except KeyError as exc:
        raise InputError(f"config is missing {exc.args[0]!r}") from None
    ratio = data.get("ideal_ratio")
    if ratio is None:
        ratio = [Fraction(1, n)] * n
    if not isinstance(ratio, list):
        raise InputError("ideal_ratio must be a list of 'p/q' strings")
    ratio = tuple(parse_rational(v) for v in ratio)
    if len(ratio) != n:
        raise InputError(f"ideal_ratio has {len(ratio)} entries, n is {n}")
    derive_bias(ratio)
    tie_break = data.get("tie_break", "reject")
    if tie_break not in ("reject", "by-id"):
        raise InputError(f"tie_break must be 'reject' or 'by-id', got {tie_break!r}")
    fmt = data.get("format", "json")
    if fmt not in ("json", "tsv"):
        raise InputError(f"format must be 'json' or 'tsv', got {fmt!r}")
    caps = dict(_DEFAULT_CAPS)
    for key, value in (data.get("caps") or {}).items():
        if key not in caps:
            raise InputError(f"unknown cap {key!r}")
        caps[key] = _positive_int(value, f"cap {key}")
    caps.update(_env_caps())
    return RunConfig(n, capacity, ratio, tie_break, caps, fmt)


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {path}: invalid JSON at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    return make_config(data)


@dataclass(frozen=True)
class Roster:
    students: tuple[Student, ...]
    ranking: PriorityRanking
    tie_broken: bool = False

    def universe(self, n: int) -> Universe:
        return Universe(self.students, n)


def load_roster(path, n: int | None = None, tie_break: str = "reject") -> Roster:
    """Read ``student_id,type,priority_score`` rows; higher score means higher priority."""
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read roster {path}: {exc.strerror}") from None
    rows = csv.reader(text.splitlines())
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != ROSTER_HEADER:
        raise InputError(f"roster line 1: header must be {','.join(ROSTER_HEADER)}")
    students = []
    scores = {}
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise InputError(f"roster line {lineno}: expected 3 fields, got {len(row)}")
        sid, typ, score = (cell.strip() for cell in row)
        if not sid:
            raise InputError(f"roster line {lineno}: empty student_id")
        if sid in scores:
            raise InputError(f"roster line {lineno}: duplicate student id {sid}")
        try:
            typ = int(typ)
        except ValueError:
            raise InputError(f"roster line {lineno}: type {typ!r} is not an integer") from None
        if typ < 1 or (n is not None and typ > n):
            raise InputError(f"roster line {lineno}: type {typ} outside 1..{n if n else 'n'}")
        try:
            value = Decimal(score)
            if not value.is_finite():
                raise InvalidOperation
        except InvalidOperation:
            raise InputError(f"roster line {lineno}: priority_score {score!r} is not a decimal") from None
        students.append(Student(sid, typ))
        scores[sid] = value
    ranking, tied = PriorityRanking.from_scores(scores, tie_break)
    return Roster(tuple(students), ranking, tied)


def rule_table_from_json(data: dict) -> RuleTable:
    try:
        capacity = data["capacity"]
        entries = data["entries"]
    except (KeyError, TypeError):
        raise InputError("rule table needs 'capacity' and 'entries'") from None
    table = {}
    for k, entry in enumerate(entries):
        try:
            applicants = frozenset(entry["applicants"])
            chosen = frozenset(entry["chosen"])
        except (KeyError, TypeError):
            raise InputError(f"rule table entry {k}: needs 'applicants' and 'chosen' lists") from None
        if applicants in table:
            raise InputError(f"rule table entry {k}: applicants {sorted(applicants)} listed twice")
        table[applicants] = chosen
    return RuleTable(capacity, table)


def load_rule_table(path) -> RuleTable:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read rule table {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"rule table {path}: invalid JSON at line {exc.lineno}") from None
    return rule_table_from_json(data)


def rule_table_to_json(table: RuleTable) -> dict:
    return {
        "capacity": table.capacity,
        "entries": [
            {"applicants": sorted(sub), "chosen": sorted(table[sub])}
            for sub in sorted(table.entries, key=canonical_key)
        ],
    }
