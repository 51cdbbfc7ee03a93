from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusgaps.errors import CertificationFailure, ParseError, PerfectPower
from torusgaps.numerics import (
    ConstantKind,
    ConstantSpec,
    PrecisionConfig,
    Real,
    agreeing_digits,
    certify,
    digits_to_bits,
    frac,
    make_constant,
    parse_constant_list,
)

CFG = PrecisionConfig()  # 80 + 40 digits
REFERENCE_CONSTANTS = ["sqrt(2)", "sqrt(3)", "sqrt(5)", "sqrt(6)", "cbrt(2)", "cbrt(3)", "e", "pi"]


def _scaled(text_value: Real, places: int) -> int:
    """floor(value * 10**places) read from the decimal expansion (value in [0, 10))."""
    s = text_value.to_decimal(places + 5)
    ip, fp = s.split(".")
    return int(ip + fp[:places])


def _icbrt(k: int) -> int:
    lo, hi = 0, 1
    while hi**3 <= k:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**3 <= k:
            lo = mid
        else:
            hi = mid
    return lo


def _e_digits(places: int) -> int:
    total, term, k = Fraction(0), Fraction(1), 0
    while term > Fraction(1, 10 ** (places + 10)):
        total += term
        k += 1
        term /= k
    return math.floor(total * 10**places)


def test_precision_config_defaults_and_validation():
    assert CFG.working_digits == 120
    assert CFG.bits >= math.ceil(120 * math.log2(10)) + 8
    with pytest.raises(ValueError):
        PrecisionConfig(target_digits=0)
    with pytest.raises(ValueError):
        PrecisionConfig(guard_digits=9)
    with pytest.raises(ValueError):
        PrecisionConfig(escalation_factor=1)
    assert CFG.escalated().working_digits == 240
    assert CFG.escalated(2).working_digits == 480
    assert CFG.escalated().target_digits == 80


def test_digits_to_bits():
    assert digits_to_bits(80) == math.ceil(80 * math.log2(10)) + 8


def test_sqrt2_matches_integer_square_root_oracle():
    x = make_constant(ConstantSpec.parse("sqrt(2)"), CFG)
    places = 120
    assert abs(_scaled(x, places) - math.isqrt(2 * 10 ** (2 * places))) <= 1
    assert x.to_decimal(20) == "1.41421356237309504880"


@pytest.mark.parametrize("k", [2, 3, 5, 6, 7, 1000])
def test_sqrt_oracle(k):
    x = make_constant(ConstantSpec(ConstantKind.SQRT, k), CFG)
    assert abs(_scaled(x, 118) - math.isqrt(k * 10 ** (2 * 118))) <= 1


@pytest.mark.parametrize("k", [2, 3, 4, 10])
def test_cbrt_oracle(k):
    x = make_constant(ConstantSpec(ConstantKind.CBRT, k), CFG)
    assert abs(_scaled(x, 118) - _icbrt(k * 10 ** (3 * 118))) <= 1


def test_e_matches_exact_rational_series():
    x = make_constant(ConstantSpec.parse("e"), CFG)
    assert abs(_scaled(x, 118) - _e_digits(118)) <= 1


def test_pi_matches_second_method():
    x = make_constant(ConstantSpec.parse("pi"), CFG)
    assert x.to_decimal(20) == "3.14159265358979323846"
    with mpmath.workdps(140):
        oracle = mpmath.nstr(mpmath.pi, 125, strip_zeros=False)
    assert x.to_decimal(115) == oracle[: len(x.to_decimal(115))]


@pytest.mark.parametrize("text", ["sqrt(4)", "sqrt(1)", "cbrt(27)", "cbrt(8)"])
def test_perfect_powers_rejected(text):
    with pytest.raises(PerfectPower):
        ConstantSpec.parse(text)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("sqrt(2)", ConstantSpec(ConstantKind.SQRT, 2)),
        ("  SQRT ( 13 ) ", ConstantSpec(ConstantKind.SQRT, 13)),
        ("Cbrt(3)", ConstantSpec(ConstantKind.CBRT, 3)),
        ("E", ConstantSpec(ConstantKind.E)),
        (" pi", ConstantSpec(ConstantKind.PI)),
    ],
)
def test_constant_grammar(text, expected):
    assert ConstantSpec.parse(text) == expected


@pytest.mark.parametrize(
    "text, offset",
    [("sqr(2)", 0), ("sqrt 2", 5), ("sqrt(x)", 5), ("sqrt(2", 6), ("pi pi", 3), ("", 0)],
)
def test_constant_grammar_errors_carry_offset(text, offset):
    with pytest.raises(ParseError) as info:
        ConstantSpec.parse(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_constant_list():
    assert parse_constant_list("cbrt(2), e", 2) == (ConstantSpec.parse("cbrt(2)"), ConstantSpec.parse("e"))
    with pytest.raises(ParseError):
        parse_constant_list("e pi", 2)


def test_frac_examples():
    assert frac(Real.from_int(7, 120)) == 0
    e = make_constant(ConstantSpec.parse("e"), CFG)
    assert frac(e).to_decimal(20) == "0.71828182845904523536"
    assert abs(frac(e) - (e - 2)).value == 0
    r2 = make_constant(ConstantSpec.parse("sqrt(2)"), CFG)
    f = frac(3 * r2)
    assert f.to_decimal(30).startswith("0.24264068711928514640")
    # 3*sqrt(2) - 4 squared-oracle check: (f + 4)^2 = 18
    assert abs(((f + 4) ** 2 - 18).value) < Real.parse("1e-117", 120).value


def test_frac_rejects_negative():
    with pytest.raises(ValueError):
        frac(Real.from_int(-1, 50))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=10**30 - 1))
def test_frac_property(ip, fp):
    x = Real.parse(f"{ip}.{fp:030d}", 120)
    f = frac(x)
    assert 0 <= f.value < 1
    assert (f + x.floor()) == x


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=10**4))
def test_sqrt_squares_back(k):
    if math.isqrt(k) ** 2 == k:
        return
    x = make_constant(ConstantSpec(ConstantKind.SQRT, k), CFG)
    assert abs((x * x - k).value) < Real.parse("1e-118", 120).value


@pytest.mark.parametrize("name", REFERENCE_CONSTANTS)
@pytest.mark.parametrize("p, q", [(30, 60), (81, 120), (120, 300)])
def test_higher_precision_truncates_to_lower(name, p, q):
    spec = ConstantSpec.parse(name)
    lo = make_constant(spec, PrecisionConfig(target_digits=p - 20, guard_digits=20))
    hi = make_constant(spec, PrecisionConfig(target_digits=q - 20, guard_digits=20))
    assert abs(_scaled(hi, p) - _scaled(lo, p)) <= 1, (name, p, q)


def test_real_arithmetic_uses_min_precision():
    a = Real.parse("0.1", 100)
    b = Real.parse("0.2", 30)
    c = a + b
    assert c.digits == 30
    assert (a * 3).digits == 100
    assert (1 - a).digits == 100
    assert float(a / b) == pytest.approx(0.5)
    assert a < b and b > a and -a < a and abs(-a) == a


def test_agreeing_digits():
    a = Real.parse("0.123456789", 50)
    b = Real.parse("0.123456780", 50)
    assert agreeing_digits(a, b) == 8
    assert agreeing_digits(a, a) == 50
    assert agreeing_digits(Real.parse("1.5", 20), Real.parse("0.5", 20)) == 0


def test_certify_sqrt2():
    spec = ConstantSpec.parse("sqrt(2)")
    result = certify(lambda c: make_constant(spec, c), CFG)
    assert result.certified_digits >= 80
    assert result.working_digits == 240


def test_certify_exact_constant():
    result = certify(lambda c: Real.parse("0.5", c.working_digits), PrecisionConfig(target_digits=200))
    assert result.certified_digits == 240


def test_certify_fails_on_precision_dependent_noise():
    def noisy(c: PrecisionConfig) -> Real:
        return Real.parse("0.5", c.working_digits) + Real.parse(f"1e-{c.working_digits // 4}", c.working_digits)

    with pytest.raises(CertificationFailure):
        certify(noisy, CFG)
