from fractions import Fraction as F
import json

import pytest
from hypothesis import given

from conftest import rational_cycles
from flatcycle import serialize as ser
from flatcycle.cycles import FLOAT, RATIONAL, Segment, make_chain
from flatcycle.errors import BadParams
from flatcycle.generators import grid_random, random_cycle
from flatcycle.grid import GridSpec
from flatcycle.kappa import beckmann, kappa
from flatcycle.quantize import QuantLattice, make_quantized
from flatcycle.transport import gnorm


def through_text(obj):
    return json.loads(ser.dumps(obj))


@given(rational_cycles(max_atoms=8))
def test_rational_cycle_round_trip(t):
    assert ser.cycle_from_obj(through_text(ser.cycle_to_obj(t))) == t


def test_float_cycle_round_trip():
    t = random_cycle(3, 9, seed=4)
    assert ser.cycle_from_obj(through_text(ser.cycle_to_obj(t))) == t


def test_num():
    assert ser.num(F(3, 4)) == "3/4"
    assert ser.num(F(5)) == "5"
    assert ser.num(7) == 7
    assert ser.num(0.5) == 0.5
    with pytest.raises(TypeError):
        ser.num(True)


def test_chain_round_trip():
    s = make_chain(2, [Segment((F(0), F(0)), (F(1, 2), F(1)), F(2, 3)), Segment((F(-1), F(0)), (F(0), F(0)), F(-1))], RATIONAL)
    assert ser.chain_from_obj(through_text(ser.chain_to_obj(s))) == s


@pytest.mark.parametrize("mode", [RATIONAL, FLOAT])
def test_solution_round_trip(mode):
    sol = gnorm(random_cycle(2, 7, seed=1, mode=mode))
    back = ser.solution_from_obj(through_text(ser.solution_to_obj(sol)))
    assert back.value == sol.value and back.dual_value == sol.dual_value and back.gap == sol.gap
    assert back.plan == list(sol.plan)
    assert back.potentials == sol.potentials
    assert (back.n, back.mode, back.metric) == (sol.n, sol.mode, sol.metric)


def test_grid_cycle_round_trip():
    g = grid_random(2, 3, 6, seed=2)
    assert ser.grid_cycle_from_obj(through_text(ser.grid_cycle_to_obj(g))) == g


def test_quantized_round_trip():
    p = make_quantized(QuantLattice(2, 1, F(1, 2)), {(0, 0): 3, (1, -1): -2, (-1, 1): -1})
    obj = through_text(ser.quantized_to_obj(p))
    assert obj["eps_hat"] == "1/72"
    assert ser.quantized_from_obj(obj) == p


def test_kappa_round_trip():
    est = kappa(random_cycle(1, 5, seed=3), 0.2)
    back = ser.kappa_from_obj(through_text(ser.kappa_to_obj(est)))
    assert (back.eps, back.value, back.distance, back.support_size) == (est.eps, est.value, est.distance, est.support_size)
    assert back.witness == est.witness


def test_field_round_trip():
    fld, _, _ = beckmann(random_cycle(2, 5, seed=8), GridSpec(2, 3))
    back = ser.field_from_obj(through_text(ser.field_to_obj(fld)))
    assert back == fld


def test_dumps_is_canonical():
    a = ser.dumps({"b": 1, "a": [1, 2]})
    assert a == '{"a":[1,2],"b":1}'


def test_malformed_input():
    with pytest.raises(BadParams):
        ser.loads("{nope")
    with pytest.raises(BadParams):
        ser.cycle_from_obj({"atoms": []})
    with pytest.raises(BadParams):
        ser.cycle_from_obj({"n": 1, "mode": "decimal", "atoms": []})
