from rest_framework import serializers
from .models import AuditLog


class AuditLogSerializer(serializers.ModelSerializer):
    class Meta:
        model = AuditLog
        fields = ('id', 'action', 'target', 'status', 'config_hash', 'timestamp', 'metadata')
        read_only_fields = fields
