# market/urls.py
from django.urls import path
from . import views

urlpatterns = [
    path('runs/', views.run_list, name='run_list'),
    path('runs/<int:run_id>/', views.run_detail, name='run_detail'),
    path('calibrations/<int:campaign_id>/', views.calibration_detail, name='calibration_detail'),
    path('sweeps/<int:sweep_id>/', views.sweep_report, name='sweep_report'),
]
