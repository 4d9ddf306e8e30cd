from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from analysis.bounds import evaluate_point, gap_constants
from analysis.export import bound_row, bounds_dataset
from experiments.config import error_text, load_experiment, write_csv
from network.exceptions import CacheNetError


class Command(BaseCommand):
    help = 'Evaluates every closed-form rate bound at one parameter point'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config (JSON)')
        parser.add_argument('--m-tilde', type=int, dest='m_tilde', help='RLFU cut-off (default: optimal)')
        parser.add_argument(
            '--scaled-cached-mass',
            action='store_true',
            help='Multiply the cached mass by M in the mbar - Mbar component'
        )
        parser.add_argument('--out', help='Write the bounds as CSV to this path')

    def handle(self, *args, **options):
        try:
            experiment = load_experiment(
                options['config'],
                m_tilde=options.get('m_tilde'),
                scaled_cached_mass=options['scaled_cached_mass'] or None,
            )
            results = evaluate_point(
                experiment.params, experiment.q, m_tilde=experiment.m_tilde,
                scaled_cached_mass=experiment.scaled_cached_mass,
                alpha=experiment.alpha,
            )
        except (ValidationError, CacheNetError) as exc:
            raise CommandError(error_text(exc)) from exc

        params = experiment.params
        self.stdout.write(f'Bounds at {params}:')
        for name, bound in results.items():
            cutoff = f' m_tilde={bound.m_tilde}' if bound.m_tilde is not None else ''
            self.stdout.write(f'  {name:<12} {bound.value:.6g}  [{bound.binding_component}]{cutoff}')
        gaps = gap_constants()
        self.stdout.write(f'Gap constants: c1={gaps.c1:.4f} c2={gaps.c2:.4f} ({gaps.note})')

        if options.get('out'):
            dataset = bounds_dataset(
                bound_row(bound, params, alpha=experiment.alpha, name=name) for name, bound in results.items()
            )
            path = write_csv(dataset.export('csv'), options['out'])
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(results)} bounds to {path}'))
