from django.contrib import admin
from .models import SuiteRun

@admin.register(SuiteRun)
class SuiteRunAdmin(admin.ModelAdmin):
    list_display = ('suite', 'passed', 'item_count', 'failed_count', 'elapsed_seconds', 'created_at')
    list_filter = ('suite', 'passed')
    readonly_fields = ('item_count', 'failed_count', 'created_at')
