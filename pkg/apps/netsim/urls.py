from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import SimulationRunViewSet

router = DefaultRouter()
router.register(r"simulations", SimulationRunViewSet, basename="simulations")

urlpatterns = [
    path("", include(router.urls)),
]
