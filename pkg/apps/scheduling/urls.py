from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import ScheduleRunViewSet

router = DefaultRouter()
router.register(r"schedules", ScheduleRunViewSet, basename="schedules")

urlpatterns = [
    path("", include(router.urls)),
]
