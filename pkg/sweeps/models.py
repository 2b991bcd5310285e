from django.db import models


class SweepJob(models.Model):
    STATUS_CHOICES = [
        ("pending", "Pendente"),
        ("running", "Executando"),
        ("success", "Concluido"),
        ("failed", "Falhou"),
    ]
    FORMAT_CHOICES = [
        ("csv", "CSV"),
        ("json", "JSON"),
    ]
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default="pending")
    spec_json = models.JSONField(default=dict, blank=True)
    output_format = models.CharField(max_length=10, choices=FORMAT_CHOICES, default="csv")
    output_path = models.CharField(max_length=500, blank=True)
    summary_json = models.JSONField(default=dict, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)
    error_message = models.TextField(blank=True)

    def __str__(self):
        return f"SweepJob {self.id} ({self.status})"
