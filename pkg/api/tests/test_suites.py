from unittest.mock import patch

from django.test import SimpleTestCase, override_settings

from api.services import bounds
from api.services.errors import BoundExceeded, MalformedInput, UnknownSuite
from api.services.suites import SUITES, Suite, get_suite, resolve_params, run_suite


@override_settings(FREECALC_N_JOBS=1)
class SuiteRunTests(SimpleTestCase):
    def assertSuitePasses(self, suite_id, params):
        report = run_suite(suite_id, params)
        failed = [item for item in report.items if not item['passed']]
        self.assertTrue(report.passed, f"{suite_id} failed: {failed}")
        self.assertTrue(report.items)
        return report

    def test_fatfacts(self):
        report = self.assertSuitePasses('fatfacts', {'k': 4})
        self.assertEqual(len(report.items), 4 * 4)

    def test_mobius(self):
        self.assertSuitePasses('mobius', {'k': 3})

    def test_mobius_item_ranges(self):
        names = [name for name, _, _ in get_suite('mobius').build(k=6)]
        self.assertIn('hat preserves mu, k=5', names)
        self.assertNotIn('hat preserves mu, k=6', names)
        self.assertIn('even-block intervals factor, k=4', names)
        self.assertNotIn('even-block intervals factor, k=5', names)

    def test_weingarten_asymptotics(self):
        self.assertSuitePasses('weingarten-asymptotics', {'k': 3, 'n': [4, 8], 'K': 4})

    def test_weingarten_inverse_dimensions(self):
        tasks = get_suite('weingarten-asymptotics').build(k=3, n=[4, 16], K=8)
        inverses = [args for name, _, args in tasks if 'inverse' in name]
        decays = [args for name, _, args in tasks if 'decay' in name]
        self.assertTrue(all(args[2] == [4, 5, 6, 7, 8, 9, 16] for args in inverses))
        self.assertTrue(all(args[2] == [4, 16] and args[1] <= 3 for args in decays))
        self.assertIn(8, [args[1] for args in inverses])

    def test_rcyclic_equivalence(self):
        report = self.assertSuitePasses('rcyclic-equivalence', {'n': [2], 'K': 2})
        self.assertEqual(len(report.items), 12)

    def test_uniform_equivalence(self):
        self.assertSuitePasses('uniform-equivalence', {'n': [2], 'K': 2})

    def test_oplus_invariance(self):
        self.assertSuitePasses('oplus-invariance', {'n': [4], 'k': 2})

    def test_hplus_invariance(self):
        report = self.assertSuitePasses('hplus-invariance', {'n': [4], 'k': 2})
        details = {item['name']: item['detail'] for item in report.items}
        self.assertIn('witness', details['index-dependent R-cyclic, n=4'])
        self.assertIn('witness', details['symmetric semicircular, n=4'])

    def test_splus_counterexample(self):
        self.assertSuitePasses('splus-counterexample', {'n': [4]})

    def test_limit_convergence(self):
        report = self.assertSuitePasses('limit-convergence', {'n': [4, 8], 'k': 2})
        self.assertEqual(len(report.items), 2 * 2 * (1 + 2))

    def test_limit_convergence_needs_large_n(self):
        with self.assertRaises(MalformedInput):
            run_suite('limit-convergence', {'n': [2, 4], 'k': 1})

    def test_divisibility(self):
        self.assertSuitePasses('divisibility', {'n': [2], 'K': 3})

    def test_report_shape(self):
        report = run_suite('mobius', {'k': 1})
        data = report.as_dict()
        self.assertEqual(data['suite'], 'mobius')
        self.assertEqual(data['params'], {'k': 1})
        self.assertNotIn('elapsed', data)
        self.assertEqual(set(data['items'][0]), {'name', 'passed', 'detail'})

    def test_item_errors_become_failures(self):
        def explode(k):
            raise RuntimeError('boom')

        broken = Suite(lambda k: [('explodes', explode, (k,))], {'k': 1}, 'broken')
        with patch.dict(SUITES, {'broken': broken}):
            report = run_suite('broken')
        self.assertFalse(report.passed)
        self.assertEqual(report.items[0]['detail'], 'error: boom')


class SuiteParamTests(SimpleTestCase):
    def test_unknown_suite(self):
        with self.assertRaises(UnknownSuite):
            get_suite('nope')
        with self.assertRaises(KeyError):
            run_suite('nope')

    def test_defaults_and_overrides(self):
        self.assertEqual(resolve_params('oplus-invariance'), {'n': [4, 5], 'k': 3})
        self.assertEqual(resolve_params('oplus-invariance', {'n': [6, 4, 6]}), {'n': [4, 6], 'k': 3})
        self.assertEqual(resolve_params('oplus-invariance', {'n': 7, 'k': '2'}), {'n': [7], 'k': 2})

    def test_rejects_bad_params(self):
        with self.assertRaises(MalformedInput):
            resolve_params('mobius', {'n': [4]})
        with self.assertRaises(MalformedInput):
            resolve_params('mobius', {'k': 0})
        with self.assertRaises(MalformedInput):
            resolve_params('divisibility', {'n': []})

    def test_every_suite_has_a_description(self):
        for suite_id, suite in SUITES.items():
            self.assertTrue(suite.description, suite_id)


class BoundTests(SimpleTestCase):
    @override_settings(FREECALC_MAX_ENUMERATE_K=5)
    def test_enumeration_bound(self):
        bounds.check_bound('k', 5, bounds.ENUMERATE)
        with self.assertRaises(BoundExceeded):
            bounds.check_bound('k', 6, bounds.ENUMERATE)
        bounds.check_bound('k', 6, bounds.ENUMERATE, force=True)

    def test_suite_bounds(self):
        with self.assertRaises(BoundExceeded):
            bounds.check_suite_params('weingarten-asymptotics', {'k': 99})
        with self.assertRaises(BoundExceeded):
            bounds.check_suite_params('weingarten-asymptotics', {'K': 99})
        with self.assertRaises(BoundExceeded):
            bounds.check_suite_params('divisibility', {'K': 99})
        bounds.check_suite_params('divisibility', {'K': 99}, force=True)
        bounds.check_suite_params('fatfacts', {})
