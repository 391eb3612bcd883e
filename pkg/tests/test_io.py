import json
from fractions import Fraction

import pytest

from herlat import io
from herlat.errors import MalformedInput
from herlat.instancegen import corpus_entries
from herlat.reduction import reduce_full


def test_rational_round_trip():
    for x in (Fraction(0), Fraction(-7), Fraction(3, 8), Fraction(10**30 + 1, 7)):
        assert io.rat_in(io.rat_out(x), "x") == x
    assert io.rat_in(5, "x") == 5
    assert io.rat_in("-2/6", "x") == Fraction(-1, 3)
    with pytest.raises(MalformedInput, match="x"):
        io.rat_in("1/0", "x")
    with pytest.raises(MalformedInput):
        io.rat_in(1.5, "x")


@pytest.mark.parametrize("entry", corpus_entries(16, seed=60)[::3], ids=lambda e: e.name)
def test_instance_round_trip(entry):
    inst = entry.build()
    text = io.dump_instance(inst)
    back = io.load_instance(text)
    assert io.dump_instance(back) == text
    assert back.disc == inst.disc


def test_cert_round_trip(micro):
    cert = reduce_full(micro)
    text = io.dump_cert(cert)
    assert io.dump_cert(io.load_cert(text)) == text
    obj = json.loads(text)
    assert list(obj) == ["format", "basis", "case_trace", "index", "d_gram", "norm_sq",
                         "eta_used", "disc_R", "disc_L", "bounds"]
    assert isinstance(obj["disc_R"], str) and obj["disc_R"].lstrip("-") == "2304"


def test_type_i_json_omits_quaternion_parameters():
    inst = corpus_entries(1)[0].build()
    obj = io.instance_to_json(inst)
    assert obj["algebra"] == {"type": "I", "minpoly": [0, 1]}
    assert list(obj["action"]) == ["t"]


def test_malformed_json_reports_position():
    with pytest.raises(MalformedInput, match="line 2 column"):
        io.load_instance('{"format":\n ]')


def test_missing_field_is_named(micro):
    obj = io.instance_to_json(micro)
    del obj["phi"]
    with pytest.raises(MalformedInput, match="phi"):
        io.instance_from_json(obj)
    obj = io.instance_to_json(micro)
    obj["action"]["i"][0][0] = "x"
    with pytest.raises(MalformedInput, match=r"action\.i"):
        io.instance_from_json(obj)


def test_bad_cert_fields(micro):
    obj = io.cert_to_json(reduce_full(micro))
    obj["case_trace"][0]["case"] = "z"
    with pytest.raises(MalformedInput, match="case_trace"):
        io.cert_from_json(obj)
    obj = io.cert_to_json(reduce_full(micro))
    obj["bounds"]["psi"] = [["0", "1"]]
    with pytest.raises(MalformedInput, match="bounds.psi"):
        io.cert_from_json(obj)
