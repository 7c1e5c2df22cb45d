from django.contrib import admin
from .models import AuditLog


@admin.register(AuditLog)
class AuditLogAdmin(admin.ModelAdmin):
    list_display = ('timestamp', 'action', 'target', 'status', 'config_hash')
    list_filter = ('action', 'status', 'timestamp')
    search_fields = ('action', 'target', 'config_hash')
    readonly_fields = ('timestamp',)
