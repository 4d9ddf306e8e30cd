from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    """Model for tracking simulate/sweep invocations"""
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('in_progress', 'In Progress'),
        ('completed', 'Completed'),
        ('failed', 'Failed')
    ]
    COMMAND_CHOICES = [
        ('simulate', 'Simulate'),
        ('sweep', 'Sweep'),
    ]

    command = models.CharField(max_length=20, choices=COMMAND_CHOICES, default='simulate')
    scheme = models.CharField(max_length=50, blank=True, help_text="Scheme label, e.g. up, rlfu(12), sup")
    parameters = models.JSONField(default=dict, help_text="Experiment configuration as submitted")
    seed = models.CharField(max_length=20, default='0', help_text="Master seed, an unsigned 64-bit integer")
    trials = models.PositiveIntegerField(default=0)
    mean_rate = models.FloatField(null=True, blank=True)
    std_error = models.FloatField(null=True, blank=True)
    bounds = models.JSONField(default=dict, blank=True)
    output_path = models.CharField(max_length=500, blank=True)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')
    started_at = models.DateTimeField(auto_now_add=True)
    completed_at = models.DateTimeField(null=True, blank=True)
    error_message = models.TextField(blank=True, null=True)

    class Meta:
        ordering = ['-started_at', '-id']
        verbose_name = 'Experiment Run'
        verbose_name_plural = 'Experiment Runs'

    def __str__(self):
        return f"{self.command} {self.scheme} - {self.status} ({self.started_at})"

    def mark_in_progress(self):
        self.status = 'in_progress'
        self.save(update_fields=['status'])

    def mark_completed(self, report=None, output_path=None):
        self.status = 'completed'
        self.completed_at = timezone.now()
        if report is not None:
            self.trials = report.trials
            self.mean_rate = report.mean_rate
            self.std_error = report.std_error
            self.bounds = {name: bound.value for name, bound in report.bounds.items()}
        if output_path:
            self.output_path = str(output_path)
        self.save()

    def mark_failed(self, error_message):
        self.status = 'failed'
        self.completed_at = timezone.now()
        self.error_message = error_message
        self.save()

    @property
    def duration(self):
        if self.completed_at:
            return self.completed_at - self.started_at
        return timezone.now() - self.started_at
