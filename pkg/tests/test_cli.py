from unittest import TestCase
import io
import json
import os
import shutil
import tempfile
from contextlib import redirect_stderr
from pybgk.cli import main, load_config, build_parser, EXIT_OK, EXIT_FAILED, EXIT_ERROR
from pybgk.closure import Model
from pybgk.helper.helpers import read_table, write_table


class TestCli(TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def path(self, name):
        return os.path.join(self.tmp, name)

    def test_generator_table(self):
        out = self.path('gen.csv')
        code = main(['generator', '--kvec', '0.3,0,0', '--tau', '1', '--model', 'ns', '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            schema, comments, columns, rows = read_table(fh)
        self.assertEqual(schema, 'generator')
        self.assertEqual(columns, ['row', 'col', 're', 'im'])
        self.assertEqual(len(rows), 25)
        self.assertIn('model ns', comments)
        entry = {(r, c): (re, im) for r, c, re, im in rows}
        self.assertAlmostEqual(entry[(0, 1)][1], -0.3)
        self.assertAlmostEqual(entry[(2, 2)][0], -0.09)

    def test_json_format(self):
        out = self.path('gen.json')
        code = main(['generator', '--kvec', '0,0.2,0', '--model', 'euler', '--format', 'json', '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            doc = json.load(fh)
        self.assertEqual(doc['schema'], 'pybgk-generator v1')
        self.assertEqual(len(doc['rows']), 25)

    def test_modes_table_round_trip(self):
        out = self.path('modes.csv')
        code = main(['modes', '--tau', '0.25', '--k-min', '0', '--k-max', '0.5', '--k-n', '3',
                     '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            text = fh.read()
        schema, comments, columns, rows = read_table(io.StringIO(text))
        self.assertEqual(schema, 'modes')
        self.assertEqual([row[0] for row in rows], [0.25, 0.5])
        self.assertTrue(all(row[-3:] == [1, 1, 1] for row in rows))
        again = io.StringIO()
        write_table(again, schema, columns, rows, comments=comments)
        self.assertEqual(again.getvalue(), text)

    def test_config_precedence(self):
        ini = self.path('run.ini')
        with open(ini, 'w') as fh:
            fh.write("[pybgk]\ntau = 0.5\nK_max = 2\nk_n = 7\n\n[coeffs]\nk-n = 2\n")
        cfg = load_config('coeffs', {'tau': '0.7'}, ini)
        self.assertEqual(cfg.tau, 0.7)
        self.assertEqual(cfg.k_n, 2)
        self.assertEqual(cfg.K_max, 2)
        self.assertEqual(load_config('modes', {}, ini).k_n, 7)
        self.assertIs(load_config('generator', {'model': 'burnett'}).model, Model.BURNETT)
        with open(ini, 'a') as fh:
            fh.write("[modes]\ncolour = red\n")
        with self.assertRaises(ValueError):
            load_config('modes', {}, ini)
        with self.assertRaises(OSError):
            load_config('modes', {}, self.path('missing.ini'))

    def test_validation_point_counts(self):
        cfg = load_config('validate', {})
        self.assertEqual((cfg.sigma_points, cfg.deth_points), (200, 500))
        self.assertEqual(load_config('validate', {'deth_points': '40'}).deth_points, 40)
        with self.assertRaises(ValueError):
            load_config('validate', {'deth_points': '1'})
        with self.assertRaises(ValueError):
            load_config('simulate', {'snapshot_every': '0'})

    def test_validate_passes(self):
        out = self.path('report.json')
        self.assertEqual(main(['validate', '--checks', '4,10', '--out', out]), EXIT_OK)
        with open(out) as fh:
            report = json.load(fh)
        self.assertEqual(report['schema'], 'pybgk-validate v1')
        self.assertTrue(report['passed'])
        self.assertEqual([c['number'] for c in report['checks']], [4, 10])

    def test_validate_detects_perturbation(self):
        out = self.path('report.json')
        code = main(['validate', '--checks', '4', '--perturb', 'c2=1e-3', '--out', out])
        self.assertEqual(code, EXIT_FAILED)
        with open(out) as fh:
            report = json.load(fh)
        self.assertFalse(report['checks'][0]['passed'])
        self.assertEqual(report['perturb'], {'c2': 1e-3})

    def test_seeded_checks_are_reproducible(self):
        first, second = self.path('a.json'), self.path('b.json')
        for out in (first, second):
            main(['validate', '--checks', '3', '--seed', '7', '--out', out])
        with open(first) as a, open(second) as b:
            self.assertEqual(a.read(), b.read())

    def test_errors(self):
        with redirect_stderr(io.StringIO()):
            self.assertEqual(main(['generator', '--tau', '0.25', '--kvec', '6,0,0']), EXIT_ERROR)
            self.assertEqual(main(['modes', '--k-n', '0']), EXIT_ERROR)
            self.assertEqual(main(['validate', '--checks', '13']), EXIT_ERROR)
            self.assertEqual(main(['plot', '--kind', 'branches']), EXIT_ERROR)
            with self.assertRaises(SystemExit) as ctx:
                main(['modes', '--no-such-option'])
        self.assertEqual(ctx.exception.code, 2)

    def test_kcrit_table(self):
        out = self.path('kcrit.csv')
        self.assertEqual(main(['kcrit', '--tau', '1', '--out', out]), EXIT_OK)
        with open(out) as fh:
            schema, _, columns, rows = read_table(fh)
        self.assertEqual(columns, ['label', 'method', 'k_crit', 'kappa_crit'])
        limits = sorted(row[3] for row in rows if row[1] == 'limit')
        for value, expected in zip(limits, [1.2533, 1.3118, 1.3560]):
            self.assertAlmostEqual(value, expected, places=3)
        bisected = sorted(row[3] for row in rows if row[1] == 'bisect')
        for a, b in zip(limits, bisected):
            self.assertAlmostEqual(a, b, places=3)

    def test_plot_writes_figure(self):
        import matplotlib
        matplotlib.use('Agg')
        out = self.path('deth.png')
        code = main(['plot', '--kind', 'deth', '--tau', '1', '--k-min', '0', '--k-max', '0.6',
                     '--k-n', '4', '--out', out])
        self.assertEqual(code, EXIT_OK)
        self.assertGreater(os.path.getsize(out), 0)

    def test_parser(self):
        args = vars(build_parser().parse_args(['simulate', '--K-max', '2']))
        self.assertEqual(args, {'command': 'simulate', 'K_max': '2', 'verbose': 0})

    def test_simulate_and_compare(self):
        out = self.path('series.csv')
        code = main(['simulate', '--tau', '0.5', '--K-max', '1', '--model', 'ns', '--t-end', '0.2',
                     '--dt-output', '0.1', '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            schema, _, columns, rows = read_table(fh)
        self.assertEqual(schema, 'series')
        self.assertEqual(len(rows), 3 * 7)
        out = self.path('compare.csv')
        code = main(['compare', '--tau', '0.5', '--K-max', '1', '--models', 'euler,ns',
                     '--t-end', '0.2', '--out', out])
        self.assertEqual(code, EXIT_OK)
        with open(out) as fh:
            _, _, columns, rows = read_table(fh)
        self.assertEqual(columns, ['time', 'euler-ns'])
        self.assertEqual(rows[0][1], 0.)

    def test_simulate_writes_snapshots(self):
        snaps = self.path('snaps')
        code = main(['simulate', '--tau', '0.5', '--K-max', '1', '--t-end', '0.2', '--dt-output', '0.1',
                     '--snapshot-every', '2', '--snapshot-dir', snaps, '--n-grid', '4',
                     '--out', self.path('series.csv')])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(sorted(os.listdir(snaps)), ['snapshot_0000.csv', 'snapshot_0002.csv'])
        with open(os.path.join(snaps, 'snapshot_0002.csv')) as fh:
            schema, comments, columns, rows = read_table(fh)
        self.assertEqual(schema, 'snapshot')
        self.assertEqual(columns[:3], ['x1', 'x2', 'x3'])
        self.assertEqual(len(rows), 4 ** 3)
