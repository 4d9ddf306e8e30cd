import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from experiments.config import error_text, load_experiment, write_csv
from experiments.harness import monte_carlo
from experiments.models import ExperimentRun
from experiments.serializers import SCHEME_KINDS
from network.conf import get_setting
from network.exceptions import CacheNetError, DecodingError
from network.system import DEMAND_MODES

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Runs Monte Carlo delivery trials for one scheme and parameter point'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config (JSON)')
        parser.add_argument('--seed', type=int, help='Master seed (overrides the config)')
        parser.add_argument('--trials', type=int, help='Number of trials (overrides the config)')
        parser.add_argument('--scheme', choices=SCHEME_KINDS, help='Placement scheme (overrides the config)')
        parser.add_argument('--mode', choices=DEMAND_MODES, help='Demand mode (overrides the config)')
        parser.add_argument('--m-tilde', type=int, dest='m_tilde', help='RLFU cut-off (default: optimal)')
        parser.add_argument('--workers', type=int, help='Worker processes for the trials')
        parser.add_argument('--out', help='Write the per-trial CSV to this path')
        parser.add_argument(
            '--no-verify',
            action='store_true',
            help='Skip encoding and decoding; only the rate is measured'
        )
        parser.add_argument(
            '--record',
            action='store_true',
            help='Store the run in the experiment log'
        )

    def handle(self, *args, **options):
        try:
            experiment = load_experiment(
                options['config'],
                seed=options.get('seed'),
                trials=options.get('trials'),
                scheme=options.get('scheme'),
                mode=options.get('mode'),
                m_tilde=options.get('m_tilde'),
            )
        except (ValidationError, CacheNetError) as exc:
            raise CommandError(error_text(exc)) from exc

        params = experiment.params
        run = None
        if options['record']:
            run = ExperimentRun.objects.create(
                command='simulate',
                scheme=experiment.scheme.label,
                parameters=params.as_dict() | {'mode': experiment.mode, 'alpha': experiment.alpha},
                seed=str(params.seed),
                trials=experiment.trials,
                status='in_progress',
            )

        try:
            report = monte_carlo(
                params, experiment.scheme, experiment.q, experiment.trials,
                mode=experiment.mode,
                workers=options.get('workers') or get_setting('WORKERS'),
                verify=not options['no_verify'],
                field_bits=experiment.field_bits,
                scaled_cached_mass=experiment.scaled_cached_mass,
            )
        except DecodingError as exc:
            logger.exception('Decoding failed')
            if run:
                run.mark_failed(str(exc))
            raise CommandError(f'Decoding failed: {exc}') from exc
        except CacheNetError as exc:
            if run:
                run.mark_failed(str(exc))
            raise CommandError(error_text(exc)) from exc

        path = None
        if options.get('out'):
            path = write_csv(report.to_csv(), options['out'])
        if run:
            run.mark_completed(report, output_path=path)

        self.stdout.write(f'{report.scheme} at {params} ({experiment.mode} demands), {report.trials} trials')
        self.stdout.write(f'  mean rate {report.mean_rate:.6g} +/- {report.std_error:.3g}')
        for name, bound in report.bounds.items():
            self.stdout.write(f'  {name:<12} {bound.value:.6g}  [{bound.binding_component}]')
        primary = next(iter(report.bounds))
        tolerance = get_setting('RATE_TOLERANCE')
        above = report.fraction_above(report.bounds[primary].value * (1 + tolerance))
        self.stdout.write(f'  trials above {primary} x {1 + tolerance:g}: {above:.1%}')
        if report.decode_ok:
            self.stdout.write(self.style.SUCCESS('  every user decoded every requested packet'))
        else:
            self.stdout.write(self.style.WARNING('  decoding was not checked'))
        if path:
            self.stdout.write(self.style.SUCCESS(f'Wrote {report.trials} trials to {path}'))
