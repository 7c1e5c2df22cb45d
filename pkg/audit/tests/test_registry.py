from unittest import mock

from django.contrib.auth.models import User
from django.db import DatabaseError
from django.test import TestCase, override_settings
from django.urls import reverse
from rest_framework.test import APITestCase

from audit.models import AuditLog
from audit.utils import log_action


class LogActionTests(TestCase):
    def test_records_run(self):
        entry = log_action(action='train', target='/tmp/run', config_hash='ab' * 32, metadata={'epochs': 2})
        self.assertEqual(AuditLog.objects.count(), 1)
        self.assertEqual(entry.status, 'success')
        self.assertEqual(entry.metadata, {'epochs': 2})

    @override_settings(AUDIT_LOG_RUNS=False)
    def test_disabled_registry_records_nothing(self):
        self.assertIsNone(log_action(action='eval'))
        self.assertEqual(AuditLog.objects.count(), 0)

    def test_database_failure_is_swallowed(self):
        with mock.patch.object(AuditLog.objects, 'create', side_effect=DatabaseError('no such table')):
            with self.assertLogs('audit.utils', level='WARNING'):
                self.assertIsNone(log_action(action='generate'))


class RunRegistryApiTests(APITestCase):
    def setUp(self):
        self.user = User.objects.create_user(username='analyst', password='TestPass123!')
        self.first = log_action(action='generate', target='data')
        self.second = log_action(action='train', target='runs/a', status='failed')

    def test_requires_authentication(self):
        resp = self.client.get(reverse('run-list'))
        self.assertIn(resp.status_code, (401, 403))

    def test_list_and_filter(self):
        self.client.force_authenticate(self.user)
        resp = self.client.get(reverse('run-list'))
        self.assertEqual(resp.status_code, 200)
        self.assertEqual(len(resp.data), 2)
        resp = self.client.get(reverse('run-list'), {'status': 'failed'})
        self.assertEqual([row['action'] for row in resp.data], ['train'])

    def test_detail(self):
        self.client.force_authenticate(self.user)
        resp = self.client.get(reverse('run-detail', args=[self.first.id]))
        self.assertEqual(resp.status_code, 200)
        self.assertEqual(resp.data['target'], 'data')
