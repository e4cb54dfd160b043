import json
import math
import os

import pytest

import fibrestab

DATA = os.environ.get("FIBRESTAB_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def ranks(groups):
    return [g.free_rank for g in groups]


def test_catalog_homology():
    assert "torus" in fibrestab.catalog_names()
    assert ranks(fibrestab.homology("torus")) == [1, 2, 1]
    klein = fibrestab.homology("klein")
    assert klein[1] == fibrestab.AbelianGroup(1, [2])
    assert str(klein[1]) == "Z + Z/2"
    assert fibrestab.betti_numbers("rp2", "Z/2") == [1, 1, 1]


def test_inline_complex():
    hollow = fibrestab.SimplicialComplex(3, [[0, 1], [1, 2], [0, 2]], "hollow")
    assert hollow.dimension == 1
    assert hollow.euler_characteristic() == 0
    assert ranks(fibrestab.homology(hollow)) == [1, 1]
    as_dict = {"name": "hollow", "vertex_count": 3, "facets": [[0, 1], [1, 2], [0, 2]]}
    assert ranks(fibrestab.homology(as_dict)) == [1, 1]


def test_invariant_factors_are_python_ints():
    factors = fibrestab.invariant_factors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert factors == [2, 6, 12]
    big = fibrestab.invariant_factors([[2**70, 0], [0, 3]])
    assert big == [1, 3 * 2**70]


def test_sequences():
    assert all(r["consistent"] for r in fibrestab.kunneth_check("s1", "s1", "Z", 0, 2))
    with open(os.path.join(DATA, "covers", "torus_cylinders.json")) as f:
        cover = json.load(f)
    assert fibrestab.mayer_vietoris(cover["total"], cover["A"], cover["B"])["exact"]
    with pytest.raises(fibrestab.NotACover):
        fibrestab.mayer_vietoris("torus", "s1", "s1")


def test_obstruction_queries():
    v = fibrestab.evaluate({"M": "s1", "U": "s1", "mode": "strong", "one_point": True})
    assert v["status"] == "OBSTRUCTED"
    v = fibrestab.evaluate({"M": "disk", "mode": "weak"})
    assert v["status"] == "NOT_OBSTRUCTED_BY_THESE_TESTS"
    assert fibrestab.is_orientable_closed("torus", 2)
    assert not fibrestab.is_orientable_closed("klein", 2)


def test_errors_map_to_exception_classes():
    with pytest.raises(fibrestab.InvalidComplex):
        fibrestab.SimplicialComplex(2, [[0, 3]])
    with pytest.raises(fibrestab.CompositeModulus):
        fibrestab.homology("torus", "Z/6")
    with pytest.raises(fibrestab.UnknownName):
        fibrestab.catalog("nowhere")
    assert issubclass(fibrestab.ParseError, fibrestab.Error)


def test_simulation():
    good = fibrestab.check_compatibility("mobius", 1000)
    assert good["pass"]
    bad = fibrestab.check_compatibility("incompatible", 1000)
    assert not bad["pass"]
    with open(os.path.join(DATA, "experiments", "linear_patch.json")) as f:
        experiment = json.load(f)
    experiment["grid"]["angle_cells"] = 5
    experiment["grid"]["fibre_cells"] = 5
    result = fibrestab.run_experiment(experiment)
    assert math.isclose(result["basin"]["converged_fraction"], 1.0)
