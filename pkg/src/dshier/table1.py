"""Static classification data for exceptional nilpotent orbits of nilpotent type."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

STATUSES = ("semisimple-exists", "non-nilpotent-exists", "nilpotent-only", "never-quasicyclic")


@dataclass(frozen=True)
class Table1Row:
    algebra: str
    nilpotent: str
    dynkin_characteristic: tuple
    depth: Fraction
    centralizer_action: str
    rank: int
    status: str

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "nilpotent": self.nilpotent,
            "dynkin_characteristic": [str(x) for x in self.dynkin_characteristic],
            "depth": str(self.depth),
            "centralizer_action": self.centralizer_action,
            "rank": self.rank,
            "status": self.status,
        }


@lru_cache(maxsize=1)
def _load() -> tuple[int, tuple[Table1Row, ...]]:
    text = resources.files("dshier").joinpath("data/table1.json").read_text(encoding="utf-8")
    raw = json.loads(text)
    rows = []
    for r in raw["rows"]:
        if r["status"] not in STATUSES:
            raise ValueError(f"bad status {r['status']!r} in table data")
        rows.append(Table1Row(
            r["algebra"], r["nilpotent"], tuple(Fraction(x) for x in r["dynkin_characteristic"]),
            Fraction(r["depth"]), r["centralizer_action"], int(r["rank"]), r["status"],
        ))
    return int(raw["version"]), tuple(rows)


def table1_version() -> int:
    return _load()[0]


def table1_rows() -> tuple[Table1Row, ...]:
    return _load()[1]


def table1_lookup(algebra_label: str, nilpotent_label: str) -> Table1Row:
    for row in table1_rows():
        if row.algebra == algebra_label and row.nilpotent == nilpotent_label:
            return row
    raise KeyError(f"no row for ({algebra_label!r}, {nilpotent_label!r})")
