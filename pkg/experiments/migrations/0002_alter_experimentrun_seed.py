# Generated by Django 5.2.1 on 2026-10-19 14:37

from django.db import migrations, models


class Migration(migrations.Migration):

    dependencies = [
        ('experiments', '0001_initial'),
    ]

    operations = [
        migrations.AlterField(
            model_name='experimentrun',
            name='seed',
            field=models.CharField(default='0', help_text='Master seed, an unsigned 64-bit integer', max_length=20),
        ),
    ]
