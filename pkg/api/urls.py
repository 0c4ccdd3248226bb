from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import (
    HealthCheckView, PartitionListView, WeingartenView, IntegrateView,
    InvarianceView, DivisibilityView, VerifyView, SuiteRunViewSet
)

router = DefaultRouter()
router.register(r'runs', SuiteRunViewSet, basename='suiterun')

urlpatterns = [
    # Health Check
    path('health/', HealthCheckView.as_view(), name='health-check'),
    path('healthz', HealthCheckView.as_view(), name='healthz'),

    # Partition calculus
    path('partitions/', PartitionListView.as_view(), name='partitions'),
    path('weingarten/', WeingartenView.as_view(), name='weingarten'),
    path('integrate/', IntegrateView.as_view(), name='integrate'),

    # Invariance and divisibility
    path('invariance/', InvarianceView.as_view(), name='invariance'),
    path('divisibility/', DivisibilityView.as_view(), name='divisibility'),

    # Verification suites
    path('verify/', VerifyView.as_view(), name='verify'),

    # ViewSets
    path('', include(router.urls)),
]
