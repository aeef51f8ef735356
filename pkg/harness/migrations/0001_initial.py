# Generated by Django 4.2.11 on 2026-10-19 10:12

from django.db import migrations, models
import django.db.models.deletion
import uuid


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('updated', models.DateTimeField(auto_now=True)),
                ('is_active', models.BooleanField(default=True)),
                ('scenario', models.CharField(max_length=40)),
                ('seeds', models.CharField(help_text='Seed list as given on the command line', max_length=200)),
                ('config', models.JSONField(default=dict)),
                ('output_dir', models.CharField(max_length=500)),
                ('status', models.CharField(choices=[('running', 'Running'), ('complete', 'Complete'), ('failed', 'Failed')], default='running', max_length=20)),
                ('started_at', models.DateTimeField(blank=True, null=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-created'],
            },
        ),
        migrations.CreateModel(
            name='MatchReportRecord',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('updated', models.DateTimeField(auto_now=True)),
                ('is_active', models.BooleanField(default=True)),
                ('seed', models.BigIntegerField()),
                ('trace_path', models.CharField(max_length=500)),
                ('goals_for', models.PositiveIntegerField(default=0)),
                ('goals_against', models.PositiveIntegerField(default=0)),
                ('goal_times', models.JSONField(blank=True, default=list)),
                ('transitions', models.JSONField(blank=True, default=dict)),
                ('lock_time', models.FloatField(blank=True, help_text='First localization lock of the home robot (s)', null=True)),
                ('lock_label', models.CharField(blank=True, max_length=40)),
                ('lock_correct', models.BooleanField(blank=True, null=True)),
                ('collisions', models.PositiveIntegerField(default=0)),
                ('violations', models.PositiveIntegerField(default=0)),
                ('trigger_error', models.FloatField(blank=True, help_text='Moving-ball trigger error (s)', null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='reports', to='harness.simulationrun')),
            ],
            options={
                'ordering': ['run', 'seed'],
                'unique_together': {('run', 'seed')},
            },
        ),
    ]
