import tablib
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from analysis.bounds import corollary1_bound, mtilde_curve, optimize_mtilde
from analysis.export import format_number
from experiments.config import error_text, load_experiment, write_csv
from network.exceptions import CacheNetError


class Command(BaseCommand):
    help = 'Finds the RLFU cut-off m_tilde that minimizes the truncated-placement rate'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config (JSON)')
        parser.add_argument('--out', help='Write the whole m_tilde curve as CSV to this path')

    def handle(self, *args, **options):
        try:
            experiment = load_experiment(options['config'])
            params, q = experiment.params, experiment.q
            m_tilde, bound = optimize_mtilde(params, q)
            up_value = corollary1_bound(params, q, params.m).value
        except (ValidationError, CacheNetError) as exc:
            raise CommandError(error_text(exc)) from exc

        self.stdout.write(f'Optimal cut-off at {params}: m_tilde={m_tilde}')
        self.stdout.write(f'  RLFU rate {bound.value:.6g} [{bound.binding_component}]')
        self.stdout.write(f'  UP rate   {up_value:.6g}')
        if up_value > 0:
            self.stdout.write(self.style.SUCCESS(f'  ratio     {bound.value / up_value:.4f}'))

        if options.get('out'):
            cutoffs, values = mtilde_curve(params, q)
            dataset = tablib.Dataset(headers=['m_tilde', 'value'])
            for cutoff, value in zip(cutoffs, values):
                dataset.append([int(cutoff), format_number(float(value))])
            path = write_csv(dataset.export('csv'), options['out'])
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(cutoffs)} cut-offs to {path}'))
