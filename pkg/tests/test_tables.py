import math
from fractions import Fraction

import pytest

from sepcert.tables import format_number, improved_family_point, table_document, threshold_table


def rows(dims):
    return {e.quantity: e for e in threshold_table(dims)}


def test_format_number():
    assert format_number(Fraction(1, 3)) == {"fraction": "1/3", "decimal": "0.333333333333"}
    assert format_number(1.5)["fraction"] is None


def test_two_qubit_rows():
    t = rows((2, 2))
    assert t["L"].exact and t["L"].lower == Fraction(1, 3)
    assert t["min-eigenvalue threshold (1-L)/D"].lower == Fraction(1, 6)
    assert "two-eigenvalue condition 3 lam_4 + 3 lam_3 >= 1" in t
    assert t["purity improved-family infimum"].lower == Fraction(5, 18)


def test_qubit_qutrit_two_eigenvalue_row():
    assert "two-eigenvalue condition 3 lam_6 + 5 lam_5 >= 1" in rows((2, 3))


def test_order():
    q = [e.quantity for e in threshold_table((2, 3))]
    assert q[0] == "L" and q[-1] == "C_S entropy"
    ks = [int(x[2:-1]) for x in q if x.startswith("C[")]
    assert ks == [5, 4, 3, 2, 1]


def test_three_qubits_sound_upper_ends():
    t = rows((2, 2, 2))
    assert t["L"].lower == Fraction(1, 25) and t["L"].upper == Fraction(1, 5)
    assert t["L"].upper_source == "bipartite-cut" and not t["L"].exact
    for e in t.values():
        assert e.lower <= e.upper, e.quantity


def test_entropy_generic_expression():
    e = rows((3, 3))["C_S entropy"]
    assert e.lower < e.upper < math.log(9)
    assert "ln" in dict(e.expression)["C_L+"]


def test_document_is_json_ready():
    import json

    doc = table_document((2, 3))
    assert json.loads(json.dumps(doc))["dims"] == [2, 3]


def test_improved_family_point():
    lam = improved_family_point(Fraction(1), (2, 2))
    assert lam == [Fraction(1, 3)] * 3 + [0]
    with pytest.raises(ValueError):
        improved_family_point(Fraction(1, 2), (2,))
