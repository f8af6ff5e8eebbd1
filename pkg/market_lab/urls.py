"""
market_lab URL Configuration

The admin browses recorded runs, campaigns and sweeps; the market app
serves the same records as JSON.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    # Admin panel
    path('admin/', admin.site.urls),

    # Include market app URLs
    path('', include('market.urls')),
]
