from django.test import SimpleTestCase
from rest_framework.exceptions import ValidationError

from experiments.harness import SWEEP_HEADERS, grid_points, sweep


class GridTests(SimpleTestCase):
    def test_cartesian_product_in_axis_order(self):
        points = grid_points({'n': [1, 2], 'L': [3, 4]})
        self.assertEqual(points, [
            {'n': 1, 'L': 3}, {'n': 1, 'L': 4}, {'n': 2, 'L': 3}, {'n': 2, 'L': 4},
        ])

    def test_no_axes_no_points(self):
        self.assertEqual(grid_points({}), [])


class SweepTests(SimpleTestCase):
    base = {'n': 3, 'm': 10, 'M': 2, 'L': 1, 'alpha': 0.8}

    def test_empty_grid_gives_header_only(self):
        dataset = sweep({'base': self.base, 'grid': {}})
        self.assertEqual(dataset.height, 0)
        self.assertEqual(dataset.export('csv').strip(), ','.join(SWEEP_HEADERS))

    def test_one_row_per_point_and_scheme(self):
        dataset = sweep({'base': self.base, 'grid': {'L': [1, 2, 3]}, 'schemes': ['up', 'rlfu', 'rlfu(5)']})
        self.assertEqual(dataset.height, 9)
        self.assertEqual(dataset['scheme'][0], 'up')
        self.assertEqual(dataset['scheme'][1], f"rlfu({dataset['m_tilde'][1]})")
        self.assertEqual(dataset['scheme'][2], 'rlfu(5)')
        self.assertEqual(dataset['m_tilde'][0], '')
        self.assertEqual(dataset['bound_name'][:3], ['thm1', 'thm1', 'thm1'])
        self.assertTrue(all(error == '' for error in dataset['error']))

    def test_infeasible_point_reported_not_fatal(self):
        dataset = sweep({'base': self.base, 'grid': {'M': [2, 20]}})
        self.assertEqual(dataset.height, 2)
        self.assertEqual(dataset['error'][0], '')
        self.assertNotEqual(dataset['error'][1], '')
        self.assertEqual(dataset['bound'][1], '')

    def test_scalar_scheme_needs_whole_files(self):
        dataset = sweep({'base': self.base, 'grid': {'B': [1, 2]}, 'schemes': ['sup']})
        self.assertEqual(dataset['bound_name'][0], 'thm5')
        self.assertIn('sup', dataset['error'][1])

    def test_zipf_library_cutoff_sweep(self):
        config = {
            'base': {'n': 50, 'm': 5000, 'M': 50, 'L': 1, 'alpha': 0.9},
            'grid': {'m_tilde': [50, 100, 200, 317, 500, 1000, 2000, 5000]},
            'schemes': ['rlfu'],
        }
        dataset = sweep(config)
        values = [float(value) for value in dataset['bound']]
        self.assertEqual(dataset['m_tilde'], ['50', '100', '200', '317', '500', '1000', '2000', '5000'])
        self.assertLess(min(values) / values[-1], 0.8)

    def test_empirical_rows_are_reproducible(self):
        config = {
            'base': {'n': 3, 'm': 6, 'L': 1, 'B': 2, 'M': 1},
            'grid': {'M': [1, 2]},
            'schemes': ['up', 'rlfu'],
            'run': 'both',
            'trials': 4,
            'seed': 3,
        }
        first = sweep(config).export('csv')
        second = sweep(config).export('csv')
        self.assertEqual(first, second)
        dataset = sweep(config, verify=False)
        self.assertTrue(all(value != '' for value in dataset['mean_rate']))
        self.assertEqual(dataset['trials'], [4, 4, 4, 4])

    def test_unknown_axis_rejected(self):
        with self.assertRaises(ValidationError):
            sweep({'base': self.base, 'grid': {'colour': [1]}})

    def test_bad_scheme_rejected(self):
        with self.assertRaises(ValidationError):
            sweep({'base': self.base, 'grid': {'L': [1]}, 'schemes': ['lru']})
