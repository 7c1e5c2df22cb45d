from django.urls import path
from . import views

urlpatterns = [
    path('runs/', views.RunList.as_view(), name='run-list'),
    path('runs/<uuid:pk>/', views.RunDetail.as_view(), name='run-detail'),
]
