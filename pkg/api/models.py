from django.db import models

from .services.suites import SUITES


class SuiteRun(models.Model):
    SUITE_CHOICES = [(suite_id, suite.description) for suite_id, suite in SUITES.items()]

    suite = models.CharField(max_length=40, choices=SUITE_CHOICES)
    params = models.JSONField(default=dict, blank=True)
    passed = models.BooleanField(default=False)
    report = models.JSONField(default=dict, blank=True, help_text="Items as returned by the suite")

    # Computed from the report
    item_count = models.IntegerField(default=0, editable=False)
    failed_count = models.IntegerField(default=0, editable=False)

    elapsed_seconds = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def save(self, *args, **kwargs):
        items = self.report.get('items', []) if self.report else []
        self.item_count = len(items)
        self.failed_count = sum(1 for item in items if not item.get('passed'))
        self.passed = bool(items) and self.failed_count == 0
        super().save(*args, **kwargs)

    def __str__(self):
        return f"{self.suite} ({'passed' if self.passed else 'failed'})"
