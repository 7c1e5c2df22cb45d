import logging

from django.conf import settings
from django.db import DatabaseError

from .models import AuditLog

logger = logging.getLogger(__name__)


def log_action(action='', target='', status='success', config_hash='', metadata=None):
    """Record a run; registry failures are logged and swallowed."""
    if not getattr(settings, 'AUDIT_LOG_RUNS', True):
        return None
    try:
        return AuditLog.objects.create(
            action=action, target=str(target)[:200], status=status,
            config_hash=config_hash, metadata=metadata or {},
        )
    except DatabaseError as exc:
        logger.warning(f'Run registry unavailable, {action} not recorded: {exc}')
        return None
