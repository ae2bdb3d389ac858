import json

import pytest

from bfsdg.exactalg import PolyParseError
from bfsdg.instances import (
    SchemaError,
    from_json,
    gen_ci,
    gen_perturbed,
    gen_tensor,
    parse_instance,
    to_json,
    write_instance,
)


def same_structure(a, b):
    assert a.ring == b.ring
    assert a.sequence == b.sequence and tuple(a.splitting) == tuple(b.splitting)
    assert a.r == b.r
    for i in range(1, 5):
        assert a.M.d(i) == b.M.d(i)
    assert a.M.products == b.M.products


@pytest.mark.parametrize("make", [gen_ci, lambda: gen_ci(32003), lambda: gen_perturbed(gen_ci(), 2)])
def test_round_trip(make, tmp_path):
    spec = make()
    path = tmp_path / "inst.json"
    write_instance(spec, path)
    same_structure(spec, parse_instance(path))
    assert to_json(parse_instance(path)) == path.read_text()


def test_tensor_round_trip():
    spec = gen_tensor()
    same_structure(spec, from_json(to_json(spec)))


def test_generation_is_deterministic():
    assert to_json(gen_perturbed(gen_ci(), 7)) == to_json(gen_perturbed(gen_ci(), 7))
    assert to_json(gen_perturbed(gen_ci(), 7)) != to_json(gen_perturbed(gen_ci(), 8))


def mutate(fn):
    data = json.loads(to_json(gen_ci()))
    fn(data)
    return json.dumps(data)


@pytest.mark.parametrize(
    "edit",
    [
        lambda d: d.pop("ring"),
        lambda d: d.__setitem__("format", 99),
        lambda d: d.__setitem__("splitting", [0, 0, 1]),
    ],
)
def test_schema_errors(edit):
    with pytest.raises(SchemaError):
        from_json(mutate(edit))


def test_bad_polynomial():
    with pytest.raises((SchemaError, PolyParseError)):
        from_json(mutate(lambda d: d.__setitem__("r", "x4 +")))
