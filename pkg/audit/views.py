from rest_framework import generics, permissions
from drf_yasg.utils import swagger_auto_schema
from drf_yasg import openapi
from .models import AuditLog
from .serializers import AuditLogSerializer


class RunList(generics.ListAPIView):
    """
    Run Registry - List
    GET /api/audit/runs/ - Recorded CLI runs, newest first
    """
    serializer_class = AuditLogSerializer
    permission_classes = [permissions.IsAuthenticated]

    def get_queryset(self):
        queryset = AuditLog.objects.all()
        action = self.request.query_params.get('action')
        if action:
            queryset = queryset.filter(action=action)
        status = self.request.query_params.get('status')
        if status:
            queryset = queryset.filter(status=status)
        return queryset

    @swagger_auto_schema(
        operation_summary="List recorded runs",
        operation_description="""Every `generate`, `train`, `eval` and `ablate` invocation, newest first.

Query Parameters:
- action: only runs of this command
- status: `success` or `failed`""",
        manual_parameters=[
            openapi.Parameter('action', openapi.IN_QUERY, type=openapi.TYPE_STRING, description='Command name'),
            openapi.Parameter('status', openapi.IN_QUERY, type=openapi.TYPE_STRING, description='success or failed'),
        ],
        responses={200: openapi.Response('Recorded runs', AuditLogSerializer(many=True))},
        tags=['Runs']
    )
    def get(self, request, *args, **kwargs):
        return super().get(request, *args, **kwargs)


class RunDetail(generics.RetrieveAPIView):
    """GET /api/audit/runs/<uuid>/"""
    queryset = AuditLog.objects.all()
    serializer_class = AuditLogSerializer
    permission_classes = [permissions.IsAuthenticated]

    @swagger_auto_schema(operation_summary="Retrieve one run", tags=['Runs'])
    def get(self, request, *args, **kwargs):
        return super().get(request, *args, **kwargs)
