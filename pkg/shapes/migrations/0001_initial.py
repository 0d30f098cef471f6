# Generated by Django 5.2.1 on 2026-10-18 12:00

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ShapeModel',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('model_id', models.CharField(max_length=255, unique=True)),
                ('label', models.CharField(max_length=255)),
                ('diagram', models.TextField()),
                ('essential_count', models.PositiveIntegerField(default=0)),
                ('filter_kind', models.CharField(choices=[('line', 'Distance from line'), ('plane', 'Distance from plane'), ('unknown', 'Unknown')], default='unknown', max_length=20)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ('model_id',),
            },
        ),
        migrations.CreateModel(
            name='Embedding',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('transform', models.CharField(choices=[('R', 'u + iv'), ('S', 'Diagonal-scaled'), ('T', 'Diagonal-scaled rotation')], max_length=1)),
                ('width', models.PositiveIntegerField()),
                ('k', models.PositiveIntegerField()),
                ('coefficients', models.JSONField()),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('shape', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='embeddings', to='shapes.shapemodel')),
            ],
            options={
                'unique_together': {('shape', 'transform', 'k')},
            },
        ),
    ]
