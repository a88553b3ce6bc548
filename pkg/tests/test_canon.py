import pytest
from hypothesis import given
from hypothesis import strategies as st

from switchboard import canon

values = st.recursive(
    st.none() | st.booleans() | st.integers()
    | st.floats(allow_nan=False, allow_infinity=False) | st.text(),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(), children, max_size=4),
    max_leaves=20)


def test_sorted_keys_no_whitespace():
    assert canon.dumps({"b": 1, "a": [True, None]}) == '{"a":[true,null],"b":1}'


def test_unicode_not_escaped():
    assert canon.dumps({"msg": "héllo ✕"}) == '{"msg":"héllo ✕"}'


def test_empty_containers():
    assert canon.dumps({}) == "{}"
    assert canon.dumps([]) == "[]"


@given(values)
def test_round_trip(v):
    assert canon.loads(canon.dumps(v)) == v


@given(values)
def test_dumps_is_stable_over_round_trip(v):
    assert canon.dumps(canon.loads(canon.dumps(v))) == canon.dumps(v)


@pytest.mark.parametrize("bad", [
    {"x": float("nan")},
    {"x": float("inf")},
    {1: "int key"},
    {"x": {2.5: "float key"}},
    {"x": object()},
    [set()],
    (1, 2),
])
def test_rejects_values_outside_the_model(bad):
    with pytest.raises(ValueError):
        canon.dumps(bad)


def test_copy_value_is_deep():
    v = {"a": [1, {"b": 2}]}
    c = canon.copy_value(v)
    assert c == v
    c["a"][1]["b"] = 99
    assert v["a"][1]["b"] == 2
