import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupledchains import (
    ObservationPattern,
    ParameterError,
    Slot,
    format_pattern,
    free_past,
    pair_past,
    parse_pattern,
    x_past,
    y_past,
)


def slots_strategy():
    symbol = st.integers(0, 9)
    return st.one_of(
        st.just(Slot.free()),
        symbol.map(Slot.x_eq),
        symbol.map(Slot.y_eq),
        st.tuples(symbol, symbol).map(lambda p: Slot.pair(*p)),
    )


class TestSyntax:
    def test_empty(self):
        assert parse_pattern("") == ObservationPattern(())
        assert format_pattern(ObservationPattern(())) == ""

    def test_each_form(self):
        p = parse_pattern("*,x=1,y=0,xy=1,0")
        assert p.slots == (Slot.free(), Slot.x_eq(1), Slot.y_eq(0), Slot.pair(1, 0))

    def test_pair_token_consumes_next(self):
        # the pair form contains a comma itself; following slots still parse
        p = parse_pattern("xy=0,1,x=1")
        assert p.slots == (Slot.pair(0, 1), Slot.x_eq(1))

    def test_whitespace_tolerated(self):
        assert parse_pattern(" x=1 , * ") == ObservationPattern(
            (Slot.x_eq(1), Slot.free())
        )

    @given(st.lists(slots_strategy(), max_size=6))
    @settings(max_examples=80)
    def test_roundtrip(self, slots):
        pattern = ObservationPattern(tuple(slots))
        assert parse_pattern(format_pattern(pattern)) == pattern

    def test_dangling_pair_token(self):
        with pytest.raises(ParameterError):
            parse_pattern("xy=0")

    def test_unknown_token(self):
        with pytest.raises(ParameterError):
            parse_pattern("z=1")

    def test_non_numeric_symbol(self):
        with pytest.raises(ParameterError):
            parse_pattern("x=a")


class TestBuilders:
    def test_builders(self):
        assert x_past([0, 1]).slots == (Slot.x_eq(0), Slot.x_eq(1))
        assert y_past([1]).slots == (Slot.y_eq(1),)
        assert pair_past([(0, 1)]).slots == (Slot.pair(0, 1),)
        assert free_past(3).depth == 3

    def test_alphabet_check(self):
        with pytest.raises(ParameterError):
            x_past([2]).check_alphabet(2)
        y_past([1]).check_alphabet(2)

    def test_matches(self):
        assert Slot.pair(1, 0).matches(1, 0)
        assert not Slot.pair(1, 0).matches(1, 1)
        assert Slot.x_eq(1).matches(1, 0) and Slot.x_eq(1).matches(1, 1)
        assert Slot.free().matches(0, 1)
