from fractions import Fraction

import pytest

from dshier.table1 import STATUSES, table1_lookup, table1_rows, table1_version


def test_fifteen_rows():
    rows = table1_rows()
    assert len(rows) == 15
    assert table1_version() == 1
    assert len({(r.algebra, r.nilpotent) for r in rows}) == 15
    assert all(r.status in STATUSES for r in rows)


@pytest.mark.parametrize("alg,label,depth,status", [
    ("G2", "~A1", Fraction(3, 2), "never-quasicyclic"),
    ("E8", "A7", Fraction(15, 2), "never-quasicyclic"),
    ("F4", "A1+~A1", Fraction(3, 2), "semisimple-exists"),
    ("E8", "4A1", Fraction(3, 2), "nilpotent-only"),
    ("E6", "2A2+A1", Fraction(5, 2), "non-nilpotent-exists"),
])
def test_lookup(alg, label, depth, status):
    row = table1_lookup(alg, label)
    assert row.depth == depth
    assert row.status == status


def test_unknown_label():
    with pytest.raises(KeyError):
        table1_lookup("E8", "D4")


def test_rows_consistent():
    ranks = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
    for r in table1_rows():
        assert len(r.dynkin_characteristic) == ranks[r.algebra]
        assert set(r.dynkin_characteristic) <= {0, Fraction(1, 2)}
        # all rows have non-integral depth, i.e. are of nilpotent type
        assert r.depth.denominator == 2
        assert r.rank >= 1


def test_to_dict_roundtrip_fields():
    d = table1_lookup("G2", "~A1").to_dict()
    assert d == {"algebra": "G2", "nilpotent": "~A1", "dynkin_characteristic": ["1/2", "0"],
                 "depth": "3/2", "centralizer_action": "1", "rank": 1, "status": "never-quasicyclic"}
