"""Exact rational helpers shared by all modules.

Every probability and utility in this package is a `fractions.Fraction`.
Vectors and matrices of rationals are numpy arrays with `dtype=object` so
that numpy's broadcasting and matrix products operate on exact values.
"""

import re
import numbers
from fractions import Fraction
import numpy as np
from parley.errors import RationalParseError, DistributionError

_INTEGER_OR_RATIO = re.compile(r'^-?\d+(/\d+)?$')
_DECIMAL = re.compile(r'^-?(\d+\.\d*|\.\d+)$')

ZERO = Fraction(0)
ONE = Fraction(1)


def rational_parse(text):
    """Parse a string as an exact canonical rational.

    Args:
        text (str): Text of the form `[-]digits[/digits]` or a finite decimal
            such as `0.6`.

    Returns:
        Fraction: Canonical (reduced, positive denominator) rational.

    Raises:
        `parley.errors.RationalParseError` if the text is malformed or has a
        zero denominator.
    """
    if not isinstance(text, str):
        raise RationalParseError(f'Expected a string, got {type(text)}.')
    stripped = text.strip()
    if _INTEGER_OR_RATIO.match(stripped) or _DECIMAL.match(stripped):
        try:
            return Fraction(stripped)
        except ZeroDivisionError:
            raise RationalParseError(f'Zero denominator in {text!r}.')
    raise RationalParseError(f'Malformed rational {text!r}.')


def format_rational(value):
    """Format a rational as the canonical string `p/q`."""
    value = as_rational(value)
    return f'{value.numerator}/{value.denominator}'


def as_rational(value):
    """Convert an integer, rational or string to a `Fraction`.

    Floats are rejected as they would silently introduce rounding error.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError('Booleans are not valid rationals.')
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return rational_parse(value)
    raise TypeError(
        f'Cannot convert {value!r} of type {type(value)} to an exact '
        f'rational; pass an int, Fraction or string.')


def rational_array(values):
    """Create an object array of `Fraction` from a (nested) sequence."""
    array = np.array(values, dtype=object)
    flat = array.reshape(-1)
    for i, value in enumerate(flat):
        flat[i] = as_rational(value)
    return array


def zeros(shape):
    """Object array of exact zeros with the given shape."""
    array = np.empty(shape, dtype=object)
    array.fill(ZERO)
    return array


def check_distribution(weights, name='weights'):
    """Check a sequence of rationals is a probability vector.

    Raises:
        `parley.errors.DistributionError` if any weight is negative or the
        weights do not sum exactly to one.
    """
    total = ZERO
    for weight in weights:
        if weight < 0:
            raise DistributionError(f'Negative entry {weight} in {name}.')
        total += weight
    if total != ONE:
        raise DistributionError(f'Entries of {name} sum to {total} not 1.')


def normalize(weights):
    """Rescale a nonnegative object array so its entries sum to one."""
    total = sum(weights, ZERO)
    if total == 0:
        raise DistributionError('Cannot normalize an all-zero vector.')
    return np.array([w / total for w in weights], dtype=object)


def format_matrix(matrix):
    """Render a 2D rational array as nested lists of `p/q` strings."""
    return [[format_rational(v) for v in row] for row in matrix]


def l1_distance(a, b):
    """L1 distance between two equal length rational vectors."""
    return sum((abs(x - y) for x, y in zip(a, b)), ZERO)
