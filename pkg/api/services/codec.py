"""
Plain JSON-ready shapes for the calculus objects.

Rationals travel as "p/q" strings in lowest terms ("3", "-1/20"),
partitions in the ``{{1,2},{3}}`` syntax and B elements as d lists of d
rationals. Shape validation of incoming payloads happens in
``api.serializers``; these functions only convert.
"""
from fractions import Fraction

import numpy as np

from .errors import MalformedInput
from .invariance import MomentArray
from .matrix_models import MatrixFamilySpec
from .opval import BaseAlgebra, DistributionSpec
from .partitions import SetPartition


def format_rational(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text):
    if isinstance(text, bool):
        raise MalformedInput(f"{text!r} is not a rational")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedInput(f"{text!r} is not a rational")
    return value


def format_partition(pi):
    return str(pi)


def parse_partition(text):
    return SetPartition.parse(text)


def format_element(value):
    return [[format_rational(entry) for entry in row] for row in np.asarray(value)]


def parse_element(rows, algebra):
    if len(rows) != algebra.d or any(len(row) != algebra.d for row in rows):
        raise MalformedInput(f"B elements must be {algebra.d}x{algebra.d}")
    return algebra.element([[parse_rational(entry) for entry in row] for row in rows])


def distribution_to_json(spec):
    return {
        'd': spec.algebra.d,
        's': spec.s,
        'K': spec.K,
        'involution': list(spec.involution),
        'entries': [
            {'word': list(word), 'interior': list(interior), 'value': format_element(value)}
            for word, interior, value in spec.entries()
        ],
    }


def distribution_from_json(data):
    algebra = BaseAlgebra(data['d'])
    entries = {}
    for entry in data.get('entries', []):
        key = (tuple(entry['word']), tuple(entry.get('interior', ())))
        if key in entries:
            raise MalformedInput(f"duplicate cumulant entry {key}")
        entries[key] = parse_element(entry['value'], algebra)
    return DistributionSpec(algebra, data['s'], data['K'], entries, data.get('involution'))


def family_to_json(family):
    return {
        'n': family.n,
        'd': family.d,
        's': family.s,
        'K': family.K,
        'involution': list(family.involution),
        'entries': [
            {
                'letters': [list(family.entry(g)) for g in word],
                'interior': list(interior),
                'value': format_element(value),
            }
            for word, interior, value in family.entries()
        ],
    }


def family_from_json(data):
    algebra = BaseAlgebra(data['d'])
    n, s = data['n'], data['s']
    layout = MatrixFamilySpec(n, s, algebra, data['K'])
    entries = {}
    for entry in data.get('entries', []):
        letters = entry['letters']
        for i, j, r in letters:
            if not (1 <= i <= n and 1 <= j <= n and 0 <= r < s):
                raise MalformedInput(f"entry ({i}, {j}, {r}) outside the family")
        word = tuple(layout.generator(i, j, r) for i, j, r in letters)
        entries[(word, tuple(entry.get('interior', ())))] = parse_element(entry['value'], algebra)
    return MatrixFamilySpec(n, s, algebra, data['K'], entries, data.get('involution'))


def moments_to_json(moments):
    entries = []
    for (word, key), value in moments.items():
        entry = {'word': list(word), 'value': format_rational(value)}
        if moments.compressed:
            entry['pattern'] = format_partition(key)
        else:
            entry['indices'] = list(key)
        entries.append(entry)
    return {
        's': moments.s,
        'n': moments.n,
        'k_max': moments.k_max,
        'compressed': moments.compressed,
        'entries': entries,
    }


def moments_from_json(data):
    compressed = bool(data.get('compressed', False))
    values = {}
    for entry in data.get('entries', []):
        word = tuple(entry['word'])
        if compressed:
            key = (word, parse_partition(entry['pattern']))
        else:
            key = (word, tuple(entry['indices']))
        values[key] = parse_rational(entry['value'])
    if compressed:
        return MomentArray(data['s'], data['k_max'], data.get('n'), kernel_values=values)
    return MomentArray(data['s'], data['k_max'], data.get('n'), values=values)


def coefficients_to_json(coefficients):
    return [
        {'pattern': format_partition(pi), 'value': format_rational(value)}
        for pi, value in coefficients.items()
        if value != 0
    ]


def certificate_to_json(certificate):
    systems = []
    for system in certificate.systems:
        row = {'k': system.k, 'word': list(system.word)}
        if system.coefficients is None:
            row['witness'] = list(system.witness)
        else:
            row['coefficients'] = coefficients_to_json(system.coefficients)
            row['dependent'] = system.dependent
        systems.append(row)
    return {
        'group': certificate.group.label,
        'n': certificate.n,
        'consistent': certificate.consistent,
        'dependent': certificate.dependent,
        'systems': systems,
    }


def matrix_to_json(matrix):
    """Gram or Weingarten table as ordered rows."""
    return {
        'group': matrix.group.label,
        'k': matrix.k,
        'n': matrix.n,
        'order': [format_partition(pi) for pi in matrix.order],
        'rows': [[format_rational(value) for value in row] for row in matrix.entries],
    }


def divisibility_to_json(report):
    return {'note': report.note, 'n': report.n, 'passed': report.passed, 'rows': list(report.rows)}
