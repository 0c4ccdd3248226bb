import json
import logging

import pandas as pd
from django.core.management.base import BaseCommand, CommandError
from rest_framework.renderers import JSONRenderer

from api.services import bounds, codec
from api.services.errors import (
    BoundExceeded,
    CalculusError,
    IncompleteMoments,
    MalformedInput,
    SingularGram,
    UnknownSuite,
)
from api.services.invariance import invariance_check, moment_array
from api.services.partitions import PartitionFamily, enumerate_partitions
from api.services.suites import SUITES, run_suite
from api.services.weingarten import QuantumGroup, gram, haar_integral, weingarten

logger = logging.getLogger(__name__)

FAILURE = 1
USAGE = 2


def _index_list(text):
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise MalformedInput(f"expected comma-separated integers, got {text!r}")


class Command(BaseCommand):
    help = 'Noncrossing partitions, Weingarten tables, Haar integrals, invariance certificates and verification suites'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        enumerate_parser = subparsers.add_parser('enumerate', help='List the partitions of a family')
        enumerate_parser.add_argument('--family', default='nc', choices=[family.value for family in PartitionFamily])
        enumerate_parser.add_argument('--k', type=int, required=True)

        weingarten_parser = subparsers.add_parser('weingarten', help='Gram and Weingarten matrices')
        weingarten_parser.add_argument('--group', required=True, choices=[group.label for group in QuantumGroup])
        weingarten_parser.add_argument('--k', type=int, required=True)
        weingarten_parser.add_argument('--n', type=int, required=True)

        integrate_parser = subparsers.add_parser('integrate', help='Haar integral of u_{i1 j1} ... u_{ik jk}')
        integrate_parser.add_argument('--group', required=True, choices=[group.label for group in QuantumGroup])
        integrate_parser.add_argument('--n', type=int, required=True)
        integrate_parser.add_argument('--i', default='', help='comma-separated row indices')
        integrate_parser.add_argument('--j', default='', help='comma-separated column indices')

        invariance_parser = subparsers.add_parser('invariance', help='Span test for quantum invariance')
        invariance_parser.add_argument('--group', required=True, choices=[group.label for group in QuantumGroup])
        source = invariance_parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--moments-file', help='MomentArray JSON')
        source.add_argument('--family-file', help='matrix family JSON; moments are computed up to --k')
        invariance_parser.add_argument('--k', type=int, help='word length for --family-file')
        invariance_parser.add_argument('--jobs', type=int, default=None)

        verify_parser = subparsers.add_parser('verify', help='Run a verification suite')
        verify_parser.add_argument('suite', help=', '.join(sorted(SUITES)))
        verify_parser.add_argument('--k', type=int, default=None)
        verify_parser.add_argument('--K', type=int, default=None, dest='order')
        verify_parser.add_argument('--n', default=None, help='comma-separated dimensions')
        verify_parser.add_argument('--jobs', type=int, default=None)

        for subparser in subparsers.choices.values():
            subparser.add_argument('--format', default='text', choices=['text', 'json', 'csv'])
            subparser.add_argument('--force', action='store_true', help='lift the configured size bounds')

    def handle(self, *args, **options):
        handler = getattr(self, f"handle_{options['subcommand']}")
        try:
            handler(options)
        except (BoundExceeded, UnknownSuite, MalformedInput, IncompleteMoments) as e:
            raise CommandError(str(e), returncode=USAGE)
        except SingularGram as e:
            raise CommandError(str(e), returncode=FAILURE)
        except CalculusError as e:
            logger.error(f"nc {options['subcommand']} failed: {str(e)}")
            raise CommandError(str(e), returncode=FAILURE)

    # Output

    def _json(self, data):
        self.stdout.write(JSONRenderer().render(data, renderer_context={'indent': 2}).decode())

    def _table(self, frame, fmt):
        if frame.empty:
            return
        if fmt == 'csv':
            self.stdout.write(frame.to_csv(index=False), ending='')
        else:
            self.stdout.write(frame.to_string(index=False))

    # Subcommands

    def handle_enumerate(self, options):
        k = options['k']
        bounds.check_bound('k', k, bounds.ENUMERATE, options['force'])
        if k < 0:
            raise MalformedInput("k must be non-negative")
        partitions = enumerate_partitions(PartitionFamily.parse(options['family']), k)
        if options['format'] == 'json':
            self._json([codec.format_partition(pi) for pi in partitions])
        elif options['format'] == 'csv':
            self._table(pd.DataFrame({
                'partition': [codec.format_partition(pi) for pi in partitions],
                'blocks': [pi.block_count for pi in partitions],
            }), 'csv')
        else:
            for pi in partitions:
                self.stdout.write(codec.format_partition(pi))

    def handle_weingarten(self, options):
        k, n = options['k'], options['n']
        bounds.check_bound('k', k, bounds.WEINGARTEN, options['force'])
        if n < 1 or k < 0:
            raise MalformedInput("k must be non-negative and n positive")
        group = QuantumGroup.parse(options['group'])
        gram_matrix = gram(group, k, n)
        matrix = weingarten(group, k, n)
        if options['format'] == 'json':
            self._json({'gram': codec.matrix_to_json(gram_matrix), 'weingarten': codec.matrix_to_json(matrix)})
            return
        labels = [codec.format_partition(pi) for pi in matrix.order]
        rows = [
            {'pi': labels[a], 'sigma': labels[b], 'gram': str(gram_matrix.entries[a, b]),
             'weingarten': codec.format_rational(matrix.entries[a, b])}
            for a in range(len(labels))
            for b in range(len(labels))
        ]
        self._table(pd.DataFrame(rows), options['format'])

    def handle_integrate(self, options):
        i, j = _index_list(options['i']), _index_list(options['j'])
        bounds.check_bound('k', len(i), bounds.WEINGARTEN, options['force'])
        value = haar_integral(options['group'], options['n'], i, j)
        if options['format'] == 'json':
            self._json({'group': options['group'], 'n': options['n'], 'i': i, 'j': j,
                        'value': codec.format_rational(value)})
        else:
            self.stdout.write(codec.format_rational(value))

    def _load(self, path):
        try:
            with open(path) as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise MalformedInput(f"cannot read {path}: {str(e)}")

    def _moments(self, options):
        if options['moments_file']:
            moments = codec.moments_from_json(self._load(options['moments_file']))
            bounds.check_bound('k_max', moments.k_max, bounds.MODEL, options['force'])
            return moments
        if options['k'] is None:
            raise MalformedInput("--family-file needs --k")
        bounds.check_bound('k', options['k'], bounds.MODEL, options['force'])
        family = codec.family_from_json(self._load(options['family_file']))
        return moment_array(family, options['k'], compressed=False)

    def handle_invariance(self, options):
        moments = self._moments(options)
        certificate = invariance_check(moments, options['group'], n_jobs=options['jobs'])
        if options['format'] == 'json':
            self._json(codec.certificate_to_json(certificate))
        else:
            rows = [
                {'k': system.k, 'word': ' '.join(map(str, system.word)),
                 'consistent': system.coefficients is not None,
                 'witness': '' if system.witness is None else ' '.join(map(str, system.witness))}
                for system in certificate.systems
            ]
            self._table(pd.DataFrame(rows), options['format'])
        if not certificate.consistent:
            raise CommandError(f"not {certificate.group}-invariant: witness {certificate.witness()}", returncode=FAILURE)
        if options['format'] == 'text':
            self.stdout.write(self.style.SUCCESS(f"{certificate.group}-invariant at n={certificate.n}"))

    def handle_verify(self, options):
        suite_id = options['suite']
        if suite_id not in SUITES:
            raise UnknownSuite(suite_id)
        params = {'k': options['k'], 'K': options['order']}
        if options['n'] is not None:
            params['n'] = _index_list(options['n'])
        # Flags the suite does not take are ignored
        params = {key: value for key, value in params.items() if value is not None and key in SUITES[suite_id].defaults}
        bounds.check_suite_params(suite_id, params, options['force'])
        report = run_suite(suite_id, params, n_jobs=options['jobs'])
        if options['format'] == 'json':
            self._json(report.as_dict())
        else:
            frame = pd.DataFrame(report.items, columns=['name', 'passed', 'detail'])
            self._table(frame, options['format'])
        if not report.passed:
            failed = sum(1 for item in report.items if not item['passed'])
            raise CommandError(f"suite {suite_id}: {failed} of {len(report.items)} items failed", returncode=FAILURE)
        if options['format'] == 'text':
            self.stdout.write(self.style.SUCCESS(f"suite {suite_id}: {len(report.items)} items passed"))
