# Generated by Django 5.0.1 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SuiteRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('suite', models.CharField(choices=[('fatfacts', 'fattening, hat and Kreweras identities'), ('mobius', 'Möbius function of NC(k)'), ('weingarten-asymptotics', 'exact inverses and 1/n decay to Möbius'), ('rcyclic-equivalence', 'R-cyclicity vs freeness over D'), ('uniform-equivalence', 'uniform R-cyclicity vs freeness over B'), ('oplus-invariance', 'uniform models are O+-invariant'), ('hplus-invariance', 'determining series and H+-invariance'), ('splus-counterexample', 'symmetric semicircular is not S+-invariant'), ('limit-convergence', 'finite-n cumulant formula converges like 1/n'), ('divisibility', 'free divisibility identities')], max_length=40)),
                ('params', models.JSONField(blank=True, default=dict)),
                ('passed', models.BooleanField(default=False)),
                ('report', models.JSONField(blank=True, default=dict, help_text='Items as returned by the suite')),
                ('item_count', models.IntegerField(default=0, editable=False)),
                ('failed_count', models.IntegerField(default=0, editable=False)),
                ('elapsed_seconds', models.FloatField(default=0.0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
