import math
from datetime import datetime

from django.http import JsonResponse
from django.views.decorators.cache import never_cache
from rest_framework import status
from rest_framework.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer
from rest_framework.response import Response
from rest_framework.views import APIView

from analysis import bounds
from network.exceptions import CacheNetError

from .config import parse_experiment
from .models import ExperimentRun
from .serializers import ExperimentRunSerializer


@never_cache
def health_check(request):
    """Simple health check endpoint."""
    return JsonResponse({
        'status': 'healthy',
        'message': 'cachenet simulator is running',
        'timestamp': datetime.now().isoformat()
    })


def _number(value):
    # strict JSON has no infinity; components undefined at M=0 go out as null
    return value if math.isfinite(value) else None


def bound_payload(bound):
    return {
        'value': _number(bound.value),
        'scheme': bound.scheme,
        'm_tilde': bound.m_tilde,
        'binding_component': bound.binding_component,
        'components': {name: _number(value) for name, value in bound.components.items()},
    }


class AnalyzeView(APIView):
    """Every closed-form bound for one parameter point."""
    renderer_classes = [JSONRenderer]

    def post(self, request):
        try:
            experiment = parse_experiment(request.data)
            results = bounds.evaluate_point(
                experiment.params, experiment.q, m_tilde=experiment.m_tilde,
                scaled_cached_mass=experiment.scaled_cached_mass,
                alpha=experiment.alpha,
            )
        except ValidationError as exc:
            return Response({'detail': exc.detail, 'code': 'invalid_config'}, status=status.HTTP_400_BAD_REQUEST)
        except CacheNetError as exc:
            return Response({'detail': str(exc), 'code': 'infeasible'}, status=status.HTTP_400_BAD_REQUEST)
        return Response({
            'params': experiment.params.as_dict(),
            'alpha': experiment.alpha,
            'bounds': {name: bound_payload(bound) for name, bound in results.items()},
        })


class OptimizeView(APIView):
    """Optimal RLFU cut-off for one parameter point."""
    renderer_classes = [JSONRenderer]

    def post(self, request):
        try:
            experiment = parse_experiment(request.data)
            m_tilde, bound = bounds.optimize_mtilde(experiment.params, experiment.q)
            up_value = bounds.corollary1_bound(experiment.params, experiment.q, experiment.params.m).value
        except ValidationError as exc:
            return Response({'detail': exc.detail, 'code': 'invalid_config'}, status=status.HTTP_400_BAD_REQUEST)
        except CacheNetError as exc:
            return Response({'detail': str(exc), 'code': 'infeasible'}, status=status.HTTP_400_BAD_REQUEST)
        return Response({
            'params': experiment.params.as_dict(),
            'm_tilde': m_tilde,
            'bound': bound_payload(bound),
            'up_value': _number(up_value),
        })


class ExperimentRunListView(APIView):
    renderer_classes = [JSONRenderer]

    def get(self, request):
        runs = ExperimentRun.objects.all()
        status_filter = request.query_params.get('status')
        if status_filter:
            runs = runs.filter(status=status_filter)
        serializer = ExperimentRunSerializer(runs[:100], many=True)
        return Response({'runs': serializer.data})
