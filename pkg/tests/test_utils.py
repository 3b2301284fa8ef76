from fractions import Fraction
import numpy as np
import pytest
from parley.errors import DistributionError, RationalParseError
from parley.utils import (
    as_rational, check_distribution, format_matrix, format_rational,
    l1_distance, normalize, rational_array, rational_parse, zeros)

SEED = 1408473625
N_RATIONAL = 100


class TestRationalParse(object):

    def test_canonical_forms(self):
        cases = {
            '1/2': Fraction(1, 2), '2/4': Fraction(1, 2), '-3/9': Fraction(-1, 3),
            '0': Fraction(0), '7': Fraction(7), '0.6': Fraction(3, 5),
            ' 5/10 ': Fraction(1, 2), '.25': Fraction(1, 4),
        }
        for text, expected in cases.items():
            value = rational_parse(text)
            assert value == expected, (
                f'parsing {text!r} gave {value}, expected {expected}.')

    def test_malformed_rejected(self):
        for text in ['', '1/', '/2', 'a/b', '1/2/3', '1e3', '1 / 2', '0x10']:
            with pytest.raises(RationalParseError):
                rational_parse(text)

    def test_zero_denominator_rejected(self):
        with pytest.raises(RationalParseError):
            rational_parse('1/0')

    def test_non_string_rejected(self):
        with pytest.raises(RationalParseError):
            rational_parse(0.5)

    def test_format_parse_identity(self):
        rng = np.random.RandomState(SEED)
        for _ in range(N_RATIONAL):
            value = Fraction(int(rng.randint(-50, 51)),
                             int(rng.randint(1, 50)))
            text = format_rational(value)
            assert rational_parse(text) == value, (
                f'{value} formatted as {text!r} does not parse back.')
            assert text == f'{value.numerator}/{value.denominator}'

    def test_integers_formatted_with_denominator(self):
        assert format_rational(0) == '0/1'
        assert format_rational(2) == '2/1'
        assert format_rational('6/4') == '3/2'


class TestAsRational(object):

    def test_accepts_exact_values(self):
        assert as_rational(3) == Fraction(3)
        assert as_rational(Fraction(2, 6)) == Fraction(1, 3)
        assert as_rational('2/6') == Fraction(1, 3)

    def test_rejects_floats_and_booleans(self):
        for value in [0.5, np.float64(0.25), True]:
            with pytest.raises(TypeError):
                as_rational(value)


class TestDistributions(object):

    def test_check_distribution(self):
        check_distribution([Fraction(1, 3), Fraction(2, 3)])
        with pytest.raises(DistributionError):
            check_distribution([Fraction(1, 2), Fraction(1, 3)])
        with pytest.raises(DistributionError):
            check_distribution([Fraction(3, 2), Fraction(-1, 2)])

    def test_normalize(self):
        weights = normalize(rational_array([1, 3]))
        assert list(weights) == [Fraction(1, 4), Fraction(3, 4)]
        with pytest.raises(DistributionError):
            normalize(zeros(3))

    def test_arrays_hold_fractions(self):
        array = rational_array([[1, '1/2'], ['0.25', 0]])
        assert array.dtype == object
        assert all(isinstance(v, Fraction) for v in array.reshape(-1))
        assert format_matrix(array) == [['1/1', '1/2'], ['1/4', '0/1']]

    def test_l1_distance(self):
        assert l1_distance(
            [Fraction(1, 2), Fraction(1, 2)],
            [Fraction(1, 4), Fraction(3, 4)]) == Fraction(1, 2)
