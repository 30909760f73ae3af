"""Mirror line grammar: parse/format round trips and rejection cases."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npptwin.mirror import (
    AdvanceRequest,
    GetRequest,
    ListRequest,
    MGetRequest,
    ModeRequest,
    MSetRequest,
    ProtocolError,
    SetRequest,
    TickRequest,
    format_request,
    format_value,
    parse_request,
)

name_st = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_", min_size=1, max_size=24)


def decimal_text_st():
    sign = st.sampled_from(["", "+", "-"])
    digits = st.text(alphabet="0123456789", min_size=1, max_size=8)
    frac = st.one_of(
        st.just(""),
        st.builds(lambda d: "." + d, st.text(alphabet="0123456789", min_size=0, max_size=6)),
    )
    exp = st.one_of(
        st.just(""),
        st.builds(
            lambda e, s, d: e + s + d,
            st.sampled_from(["e", "E"]),
            st.sampled_from(["", "+", "-"]),
            st.text(alphabet="0123456789", min_size=1, max_size=3),
        ),
    )
    whole = st.builds(lambda s, d, f, e: s + d + f + e, sign, digits, frac, exp)
    bare_frac = st.builds(
        lambda s, d, e: s + "." + d + e,
        sign,
        st.text(alphabet="0123456789", min_size=1, max_size=6),
        exp,
    )
    return st.one_of(whole, bare_frac)


class TestParse:
    def test_get(self):
        assert parse_request("GET t_avg_c") == GetRequest("t_avg_c")

    def test_mset_two_pairs(self):
        req = parse_request("MSET rod_position=0.5 turbine_throttle=0.9")
        assert isinstance(req, MSetRequest)
        assert len(req.pairs) == 2
        assert req.pairs[0][:2] == ("rod_position", 0.5)

    def test_unknown_verb_is_400(self):
        with pytest.raises(ProtocolError) as exc:
            parse_request("FROB x")
        assert exc.value.code == 400

    def test_list_tick(self):
        assert parse_request("LIST") == ListRequest()
        assert parse_request("TICK") == TickRequest()

    def test_mode(self):
        assert parse_request("MODE lockstep") == ModeRequest("lockstep")
        with pytest.raises(ProtocolError):
            parse_request("MODE warp")

    def test_advance(self):
        assert parse_request("ADVANCE 50") == AdvanceRequest(50)
        with pytest.raises(ProtocolError):
            parse_request("ADVANCE 0")
        with pytest.raises(ProtocolError):
            parse_request("ADVANCE 050")

    def test_decimal_forms(self):
        for text in ("1", "-1.5", "+.25", "3.", "2e3", "-1.5E-2", "+7.25e+1"):
            req = parse_request(f"SET rod_position {text}")
            assert isinstance(req, SetRequest)
            assert req.text == text

    @pytest.mark.parametrize(
        "line",
        [
            "",
            " GET x",
            "GET  x",
            "GET x ",
            "GET",
            "GET X",
            "SET a",
            "SET a b",
            "MSET a",
            "MSET a==1",
            "MSET a=1=2",
            "LIST now",
            "ADVANCE -5",
            "ADVANCE 1.5",
        ],
    )
    def test_rejects_malformed(self, line):
        with pytest.raises(ProtocolError):
            parse_request(line)

    def test_batch_limit(self):
        line = "MGET " + " ".join(f"v{i}" for i in range(1001))
        with pytest.raises(ProtocolError):
            parse_request(line)


class TestRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(name_st)
    def test_get_round_trip(self, name):
        line = f"GET {name}"
        assert format_request(parse_request(line)) == line

    @settings(max_examples=200, deadline=None)
    @given(st.lists(name_st, min_size=1, max_size=20))
    def test_mget_round_trip(self, names):
        line = "MGET " + " ".join(names)
        assert format_request(parse_request(line)) == line

    @settings(max_examples=200, deadline=None)
    @given(name_st, decimal_text_st())
    def test_set_round_trip(self, name, dec):
        line = f"SET {name} {dec}"
        assert format_request(parse_request(line)) == line

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(name_st, decimal_text_st()), min_size=1, max_size=12))
    def test_mset_round_trip(self, pairs):
        line = "MSET " + " ".join(f"{n}={d}" for n, d in pairs)
        assert format_request(parse_request(line)) == line

    def test_ten_thousand_randomized_lines(self):
        rng = random.Random(20260809)
        lines = [random_request_line(rng) for _ in range(10_000)]
        for line in lines:
            assert format_request(parse_request(line)) == line


def random_name(rng: random.Random) -> str:
    alphabet = "abcdefghijklmnopqrstuvwxyz0123456789_"
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 16)))


def random_decimal(rng: random.Random) -> str:
    sign = rng.choice(["", "+", "-"])
    kind = rng.randrange(3)
    digits = lambda n: "".join(rng.choice("0123456789") for _ in range(n))
    if kind == 0:
        body = digits(rng.randint(1, 8))
    elif kind == 1:
        body = digits(rng.randint(1, 6)) + "." + digits(rng.randint(0, 6))
    else:
        body = "." + digits(rng.randint(1, 6))
    if rng.random() < 0.4:
        body += rng.choice("eE") + rng.choice(["", "+", "-"]) + digits(rng.randint(1, 3))
    return sign + body


def random_request_line(rng: random.Random) -> str:
    verb = rng.choice(["LIST", "GET", "MGET", "SET", "MSET", "TICK", "MODE", "ADVANCE"])
    if verb == "LIST" or verb == "TICK":
        return verb
    if verb == "GET":
        return f"GET {random_name(rng)}"
    if verb == "MGET":
        k = rng.randint(1, 120)
        return "MGET " + " ".join(random_name(rng) for _ in range(k))
    if verb == "SET":
        return f"SET {random_name(rng)} {random_decimal(rng)}"
    if verb == "MSET":
        k = rng.randint(1, 120)
        return "MSET " + " ".join(f"{random_name(rng)}={random_decimal(rng)}" for _ in range(k))
    if verb == "MODE":
        return f"MODE {rng.choice(['rt', 'lockstep'])}"
    return f"ADVANCE {rng.randint(1, 10_000_000)}"


class TestValueFormat:
    def test_shortest_exact_form(self):
        assert format_value(0.016891891891891893) == "0.016891891891891893"
        assert format_value(3000.0) == "3000.0"
        assert format_value(-1.5) == "-1.5"

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_bitwise_round_trip(self, v):
        assert float(format_value(v)) == v

    def test_emitted_form_matches_request_decimal_grammar(self):
        for v in (1e-05, 3000.0, -1.5, 0.016891891891891893, 2.5e300):
            parse_request(f"SET rod_position {format_value(v)}")
