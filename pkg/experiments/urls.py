from django.urls import path

from .views import AnalyzeView, ExperimentRunListView, OptimizeView

app_name = 'experiments'

urlpatterns = [
    path('analyze/', AnalyzeView.as_view(), name='analyze'),
    path('optimize/', OptimizeView.as_view(), name='optimize'),
    path('runs/', ExperimentRunListView.as_view(), name='runs'),
]
