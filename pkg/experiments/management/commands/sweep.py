import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from experiments.config import error_text, load_sweep, write_csv
from experiments.harness import sweep
from experiments.models import ExperimentRun
from experiments.serializers import RUN_KINDS
from network.exceptions import CacheNetError, DecodingError

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Runs a grid of parameter points and writes one CSV row per point and scheme'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Sweep config (JSON)')
        parser.add_argument('--seed', type=int, help='Master seed (overrides the config)')
        parser.add_argument('--trials', type=int, help='Trials per empirical point (overrides the config)')
        parser.add_argument('--run', choices=RUN_KINDS, help='analytical, empirical or both (overrides the config)')
        parser.add_argument('--workers', type=int, help='Worker processes for the trials')
        parser.add_argument('--out', help='CSV path (default: standard output)')
        parser.add_argument('--no-verify', action='store_true', help='Skip encoding and decoding')
        parser.add_argument('--record', action='store_true', help='Store the run in the experiment log')

    def handle(self, *args, **options):
        try:
            config, base_dir = load_sweep(
                options['config'],
                seed=options.get('seed'),
                trials=options.get('trials'),
                run=options.get('run'),
            )
        except ValidationError as exc:
            raise CommandError(error_text(exc)) from exc

        run = None
        if options['record']:
            run = ExperimentRun.objects.create(
                command='sweep',
                scheme=','.join(str(s) for s in config.get('schemes', ['up']))[:50],
                parameters=config,
                seed=str(config.get('seed') or 0),
                trials=config.get('trials') or 0,
                status='in_progress',
            )

        try:
            dataset = sweep(config, base_dir=base_dir, workers=options.get('workers'), verify=not options['no_verify'])
        except DecodingError as exc:
            logger.exception('Decoding failed during sweep')
            if run:
                run.mark_failed(str(exc))
            raise CommandError(f'Decoding failed: {exc}') from exc
        except (ValidationError, CacheNetError) as exc:
            if run:
                run.mark_failed(error_text(exc))
            raise CommandError(error_text(exc)) from exc

        text = dataset.export('csv')
        path = None
        if options.get('out'):
            path = write_csv(text, options['out'])
        else:
            self.stdout.write(text, ending='')
        if run:
            run.mark_completed(output_path=path)

        failed = sum(1 for error in dataset['error'] if error) if dataset.height else 0
        if failed:
            self.stderr.write(self.style.WARNING(f'{failed} of {dataset.height} rows could not be evaluated'))
        if path:
            self.stdout.write(self.style.SUCCESS(f'Wrote {dataset.height} rows to {path}'))
