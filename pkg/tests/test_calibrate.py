import json

import pytest

from bfsdg.bfs_core.calibrate import (
    MAX_REPAIRS,
    NumericOracle,
    _confirm,
    _reading,
    _search,
    block_candidates,
    calibrate,
    dictionary,
    oracle_instances,
)
from bfsdg.bfs_core.structure import TypecheckFailure, printed_skeleton, target_of, slots_of, well_typed


@pytest.fixture(scope="module")
def full():
    return calibrate("full")


def test_log_records_every_ill_typed_entry(full):
    entries = {rep["entry"] for rep in full.log}
    assert "f1 block K1 -> R" in entries
    assert "product (1,2) component M3" in entries
    replacements = {rep["replacement"] for rep in full.log}
    assert "+m1(alpha1(phi1))" in replacements
    assert any("m4(omega)" in r for r in replacements)
    xt = [rep for rep in full.log if "Xt" in rep["printed"]]
    assert len(xt) == 1 and xt[0]["kind"] == "swap+sign"


def test_unique_structure(full):
    assert full.stats["distinct_structures"] == 1
    assert full.stats["passing_readings"] >= 1


def test_log_is_stable_json(full):
    assert json.loads(full.log_json()) == full.log
    assert full.log_json() == calibrate("full").log_json()


def test_off_and_signs_modes_refuse_printed_tables():
    for mode in ("off", "signs"):
        with pytest.raises(TypecheckFailure) as info:
            calibrate(mode)
        assert any("alpha4" in p for p in info.value.problems)


def test_unknown_mode():
    with pytest.raises(ValueError):
        calibrate("guess")


def test_repairs_bounded_per_block():
    skeleton = printed_skeleton()
    keys = sorted(k for k in skeleton if k[:2] == ("f", 1))
    for cand in block_candidates(keys, skeleton, "full"):
        assert cand.cost <= MAX_REPAIRS


def test_dictionary_terms_are_well_typed():
    for key in ((("f", 2, 0, 1)), ("p", 1, 1, 0), ("p", 1, 2, 0)):
        terms = dictionary(key)
        assert terms
        for t in terms:
            assert well_typed(t, slots_of(key), target_of(key))


def test_ci_alone_picks_a_reading_the_tensor_instance_rejects(full):
    """On CI, X = 0, so the cheapest CI-only reading keeps the printed X^t sign; it is wrong."""
    oracles = oracle_instances()
    ci = [o for o in oracles if o[0] == "ci-generic"]
    tensor = [o for o in oracles if o[0] == "tensor-generic"]
    found, stats = _search(printed_skeleton(), "full", [NumericOracle(n, ing) for n, ing in ci])
    assert stats["total_repairs"] < full.stats["total_repairs"]
    for choice in found:
        assert _confirm(_reading(choice, printed_skeleton()), ci) is None
        assert _confirm(_reading(choice, printed_skeleton()), tensor) is not None
