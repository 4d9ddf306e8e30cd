# Generated by Django 5.2.1 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('simulate', 'Simulate'), ('sweep', 'Sweep')], default='simulate', max_length=20)),
                ('scheme', models.CharField(blank=True, help_text='Scheme label, e.g. up, rlfu(12), sup', max_length=50)),
                ('parameters', models.JSONField(default=dict, help_text='Experiment configuration as submitted')),
                ('seed', models.PositiveBigIntegerField(default=0)),
                ('trials', models.PositiveIntegerField(default=0)),
                ('mean_rate', models.FloatField(blank=True, null=True)),
                ('std_error', models.FloatField(blank=True, null=True)),
                ('bounds', models.JSONField(blank=True, default=dict)),
                ('output_path', models.CharField(blank=True, max_length=500)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('in_progress', 'In Progress'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('started_at', models.DateTimeField(auto_now_add=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
                ('error_message', models.TextField(blank=True, null=True)),
            ],
            options={
                'verbose_name': 'Experiment Run',
                'verbose_name_plural': 'Experiment Runs',
                'ordering': ['-started_at', '-id'],
            },
        ),
    ]
