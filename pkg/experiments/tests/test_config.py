import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings
from rest_framework.exceptions import ValidationError

from experiments.config import error_text, load_experiment, parse_experiment
from network.conf import get_setting

from .utils import write_config


class ParseExperimentTests(SimpleTestCase):
    def test_defaults(self):
        experiment = parse_experiment({'n': 2, 'm': 4, 'M': '3/2', 'L': 1})
        self.assertEqual(experiment.params.M, Fraction(3, 2))
        self.assertEqual(experiment.scheme.kind, 'up')
        self.assertEqual(experiment.mode, 'iid')
        self.assertEqual(experiment.alpha, 0.0)
        self.assertTrue(experiment.q.is_uniform())
        self.assertEqual(experiment.trials, get_setting('DEFAULT_TRIALS'))

    @override_settings(CACHENET={'DEFAULT_TRIALS': 7, 'DEFAULT_SEED': 42})
    def test_defaults_follow_settings(self):
        experiment = parse_experiment({'n': 2, 'm': 4, 'M': 1, 'L': 1})
        self.assertEqual((experiment.trials, experiment.params.seed), (7, 42))

    def test_overrides_win(self):
        experiment = parse_experiment({'n': 2, 'm': 4, 'M': 1, 'L': 1, 'seed': 1}, seed=9, scheme='rlfu', m_tilde=3)
        self.assertEqual(experiment.params.seed, 9)
        self.assertEqual(experiment.scheme.label, 'rlfu(3)')

    def test_cutoff_ignored_outside_rlfu(self):
        experiment = parse_experiment({'n': 2, 'm': 4, 'M': 1, 'L': 1, 'm_tilde': 3})
        self.assertIsNone(experiment.scheme.m_tilde)
        self.assertEqual(experiment.m_tilde, 3)

    def test_explicit_weights_are_sorted(self):
        experiment = parse_experiment({'n': 2, 'm': 3, 'M': 1, 'L': 1, 'q': [1, 2, 1]})
        np.testing.assert_allclose(experiment.q.q, [0.5, 0.25, 0.25])
        self.assertIsNone(experiment.alpha)

    def test_rejections(self):
        bad = [
            {'n': 2, 'm': 3, 'M': 1, 'L': 1, 'q': [1, 2]},
            {'n': 2, 'm': 3, 'M': 1, 'L': 1, 'scheme': 'rap'},
            {'n': 2, 'm': 3, 'M': 1, 'L': 1, 'scheme': 'sup', 'B': 2},
            {'n': 2, 'm': 3, 'M': 2, 'L': 1, 'm_tilde': 1},
            {'n': 0, 'm': 3, 'M': 1, 'L': 1},
            {'n': 2, 'm': 3, 'M': -1, 'L': 1},
        ]
        for data in bad:
            with self.subTest(data=data), self.assertRaises(ValidationError):
                parse_experiment(data)

    def test_error_text_is_one_line(self):
        try:
            parse_experiment({'n': 2, 'm': 3, 'M': 1, 'L': 1, 'q': [1, 2]})
        except ValidationError as exc:
            self.assertEqual(error_text(exc), 'q: expected 3 probabilities, got 2')


class LoadExperimentTests(SimpleTestCase):
    def test_popularity_file_relative_to_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            Path(tmp, 'q.txt').write_text('0.5\n0.3\n0.2\n')
            config = write_config(tmp, {'n': 2, 'm': 3, 'M': 1, 'L': 1, 'q_file': 'q.txt'})
            experiment = load_experiment(config)
        np.testing.assert_allclose(experiment.q.q, [0.5, 0.3, 0.2])

    def test_popularity_file_of_wrong_length(self):
        with tempfile.TemporaryDirectory() as tmp:
            Path(tmp, 'q.txt').write_text('0.5\n0.5\n')
            config = write_config(tmp, {'n': 2, 'm': 3, 'M': 1, 'L': 1, 'q_file': 'q.txt'})
            with self.assertRaises(ValidationError):
                load_experiment(config)

    def test_not_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, 'config.json')
            path.write_text('{n: 2')
            with self.assertRaises(ValidationError):
                load_experiment(path)
