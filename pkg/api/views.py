import logging
import sys
from datetime import datetime

from decouple import config
from rest_framework import permissions, status, viewsets
from rest_framework.exceptions import APIException, ValidationError
from rest_framework.pagination import PageNumberPagination
from rest_framework.response import Response
from rest_framework.views import APIView

from .models import SuiteRun
from .serializers import (
    DivisibilityRequestSerializer,
    IntegrateSerializer,
    InvarianceRequestSerializer,
    PartitionQuerySerializer,
    SuiteRunSerializer,
    VerifyRequestSerializer,
    WeingartenQuerySerializer,
)
from .services import bounds, codec
from .services.errors import BoundExceeded, CalculusError, SingularGram
from .services.infdiv import verify_divisibility_equivalence
from .services.invariance import invariance_check, moment_array
from .services.partitions import PartitionFamily, enumerate_partitions
from .services.suites import run_suite
from .services.weingarten import gram, haar_integral, weingarten

logger = logging.getLogger(__name__)


class UnprocessableComputation(APIException):
    status_code = 422
    default_detail = 'The computation is not defined for this input.'
    default_code = 'UNPROCESSABLE_COMPUTATION'


class ComputationTooLarge(APIException):
    status_code = 413
    default_detail = 'The request exceeds the configured computation bounds.'
    default_code = 'COMPUTATION_TOO_LARGE'


def _run(computation, *args, **kwargs):
    """Call into api.services, turning calculus errors into API errors."""
    try:
        return computation(*args, **kwargs)
    except BoundExceeded as e:
        raise ComputationTooLarge(str(e))
    except SingularGram as e:
        raise UnprocessableComputation(str(e))
    except ValueError as e:
        raise ValidationError({'detail': str(e)})
    except CalculusError as e:
        logger.warning(f"{computation.__name__} failed: {str(e)}")
        raise UnprocessableComputation(str(e))


class HealthCheckView(APIView):
    """
    Health check endpoint for monitoring and deployment verification.
    """
    permission_classes = [permissions.AllowAny]

    def get(self, request):
        return Response({
            'status': 'healthy',
            'service': 'freecalc API',
            'python_version': f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}",
            'debug': config('DEBUG', default=False, cast=bool),
            'timestamp': datetime.now().isoformat(),
        }, status=status.HTTP_200_OK)


class PartitionPagination(PageNumberPagination):
    page_size = 50
    page_size_query_param = 'page_size'
    max_page_size = 500


class PartitionListView(APIView):
    """
    GET /api/partitions/?family=nc&k=4 - paginated partitions in RGS order.
    """
    permission_classes = [permissions.AllowAny]

    def get(self, request):
        query = PartitionQuerySerializer(data=request.query_params)
        query.is_valid(raise_exception=True)
        k = query.validated_data['k']
        _run(bounds.check_bound, 'k', k, bounds.ENUMERATE)
        family = PartitionFamily.parse(query.validated_data['family'])
        partitions = _run(enumerate_partitions, family, k)

        paginator = PartitionPagination()
        page = paginator.paginate_queryset(partitions, request, view=self)
        return paginator.get_paginated_response([
            {'partition': codec.format_partition(pi), 'blocks': pi.block_count}
            for pi in page
        ])


class WeingartenView(APIView):
    """
    GET /api/weingarten/?group=s%2B&k=3&n=4 - Gram and Weingarten tables.
    """
    permission_classes = [permissions.AllowAny]

    def get(self, request):
        query = WeingartenQuerySerializer(data=request.query_params)
        query.is_valid(raise_exception=True)
        data = query.validated_data
        _run(bounds.check_bound, 'k', data['k'], bounds.WEINGARTEN)
        return Response({
            'gram': codec.matrix_to_json(_run(gram, data['group'], data['k'], data['n'])),
            'weingarten': codec.matrix_to_json(_run(weingarten, data['group'], data['k'], data['n'])),
        })


class IntegrateView(APIView):
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = IntegrateSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        _run(bounds.check_bound, 'k', len(data['i']), bounds.WEINGARTEN)
        value = _run(haar_integral, data['group'], data['n'], data['i'], data['j'])
        return Response({**data, 'value': codec.format_rational(value)})


class InvarianceView(APIView):
    """
    POST /api/invariance/ - span test of a moment array (or of a matrix
    family's moments) against a free quantum group.
    """
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = InvarianceRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data

        if 'moments' in data:
            moments = _run(codec.moments_from_json, data['moments'])
            _run(bounds.check_bound, 'k_max', moments.k_max, bounds.MODEL)
        else:
            _run(bounds.check_bound, 'k_max', data['k_max'], bounds.MODEL)
            family = _run(codec.family_from_json, data['family'])
            moments = _run(moment_array, family, data['k_max'])

        certificate = _run(invariance_check, moments, data['group'])
        return Response(codec.certificate_to_json(certificate))


class DivisibilityView(APIView):
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = DivisibilityRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        base = _run(codec.distribution_from_json, data['base'])
        _run(bounds.check_bound, 'K', base.K, bounds.MODEL)
        report = _run(verify_divisibility_equivalence, base, data['n'])
        return Response(codec.divisibility_to_json(report))


class VerifyView(APIView):
    """
    POST /api/verify/ - run a verification suite and keep its report.
    """
    permission_classes = [permissions.AllowAny]

    def post(self, request):
        serializer = VerifyRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        suite_id = serializer.validated_data['suite']
        params = serializer.validated_data['params']
        _run(bounds.check_suite_params, suite_id, params)

        report = _run(run_suite, suite_id, params)
        run = SuiteRun.objects.create(
            suite=suite_id,
            params=report.params,
            report=report.as_dict(),
            elapsed_seconds=report.elapsed,
        )
        logger.info(f"Stored suite run {run.id} ({suite_id}, passed={run.passed})")
        return Response(SuiteRunSerializer(run).data, status=status.HTTP_201_CREATED)


class SuiteRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = SuiteRun.objects.all()
    serializer_class = SuiteRunSerializer
    permission_classes = [permissions.AllowAny]

    def get_queryset(self):
        queryset = SuiteRun.objects.all()
        suite = self.request.query_params.get('suite', None)
        if suite:
            queryset = queryset.filter(suite=suite)
        return queryset
