import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from sweeps.models import SweepJob
from sweeps.services.jobs import claim_job, enqueue_sweep

SPEC = {
    "metric": "ds_prob_stubborn",
    "alpha_start": 0.1,
    "alpha_stop": 0.4,
    "alpha_step": 0.1,
    "gamma_start": 0.0,
    "gamma_stop": 1.0,
    "gamma_step": 0.25,
    "k": 6,
}


class JobClaimTests(TestCase):
    def test_claim_job_only_once(self):
        job = SweepJob.objects.create(spec_json=SPEC, status="pending")
        first = claim_job(job.id)
        second = claim_job(job.id)
        self.assertTrue(first)
        self.assertFalse(second)
        job.refresh_from_db()
        self.assertEqual(job.status, "running")
        self.assertIsNotNone(job.started_at)


class EnqueueTests(TestCase):
    def test_default_output_path(self):
        with tempfile.TemporaryDirectory() as tmp, override_settings(FORKRISK_SWEEP_OUTPUT_DIR=Path(tmp)):
            job = enqueue_sweep(SPEC, "json")
        self.assertEqual(job.status, "pending")
        self.assertTrue(job.output_path.endswith(f"sweep-{job.id}.json"))

    def test_invalid_spec_not_stored(self):
        with self.assertRaises(ValueError):
            enqueue_sweep({**SPEC, "k": None})
        self.assertFalse(SweepJob.objects.exists())


class RunSweepJobsCommandTests(TestCase):
    def test_runs_pending_job(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out" / "ds.csv"
            job = enqueue_sweep(SPEC, "csv", str(path))
            out = StringIO()
            call_command("run_sweep_jobs", stdout=out)

            job.refresh_from_db()
            self.assertEqual(job.status, "success")
            self.assertEqual(job.summary_json["rows"], 20)
            self.assertIsNotNone(job.finished_at)
            self.assertIn(f"Job {job.id} completed", out.getvalue())
            with path.open() as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["alpha", "gamma", "value"])
        self.assertEqual(len(rows), 21)

    def test_failed_job_records_error(self):
        job = SweepJob.objects.create(spec_json={"metric": "rho_L"}, output_path="unused.csv")
        err = StringIO()
        call_command("run_sweep_jobs", stdout=StringIO(), stderr=err)
        job.refresh_from_db()
        self.assertEqual(job.status, "failed")
        self.assertIn("invalid sweep", job.error_message)
        self.assertIn(f"Job {job.id} failed", err.getvalue())

    def test_empty_queue_reported(self):
        SweepJob.objects.create(spec_json=SPEC, status="success")
        out = StringIO()
        call_command("run_sweep_jobs", stdout=out)
        self.assertIn("No pending sweep jobs found", out.getvalue())

    def test_job_id_filter(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = enqueue_sweep(SPEC, "csv", str(Path(tmp) / "a.csv"))
            second = enqueue_sweep(SPEC, "csv", str(Path(tmp) / "b.csv"))
            call_command("run_sweep_jobs", job_id=second.id, stdout=StringIO())
        first.refresh_from_db()
        second.refresh_from_db()
        self.assertEqual(first.status, "pending")
        self.assertEqual(second.status, "success")


class SweepCommandTests(TestCase):
    def test_csv_to_stdout(self):
        out = StringIO()
        call_command(
            "sweep",
            metric="rho_L",
            alpha_start=0.35,
            alpha_stop=0.35,
            alpha_step=0.05,
            gamma_start=0.0,
            gamma_stop=0.0,
            gamma_step=0.1,
            level="2",
            stdout=out,
        )
        self.assertEqual(out.getvalue().split("\n")[0], "alpha,gamma,value,numerator,denominator")
        self.assertTrue(out.getvalue().split("\n")[1].startswith("0.350000,0.000000,0.3665"))

    def test_writes_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "lstar.json"
            out = StringIO()
            call_command(
                "sweep",
                metric="L_star",
                alpha_start=0.3,
                alpha_stop=0.45,
                alpha_step=0.05,
                gamma_start=0.0,
                gamma_stop=1.0,
                gamma_step=0.5,
                out=str(path),
                output_format="json",
                as_json=True,
                stdout=out,
            )
            summary = json.loads(out.getvalue())
            written = json.loads(path.read_text())
        self.assertEqual(summary["rows"], 12)
        self.assertEqual(len(written), 12)
        self.assertEqual(written[0]["alpha"], 0.3)

    def test_enqueue(self):
        out = StringIO()
        call_command(
            "sweep",
            metric="service",
            alpha_start=0.1,
            alpha_stop=0.2,
            alpha_step=0.1,
            gamma_start=0.0,
            gamma_stop=0.0,
            gamma_step=0.1,
            k=6,
            strategy="stealth",
            enqueue=True,
            as_json=True,
            stdout=out,
            stderr=StringIO(),
        )
        job = SweepJob.objects.get()
        self.assertEqual(json.loads(out.getvalue())["id"], job.id)
        self.assertEqual(job.status, "pending")
        self.assertEqual(job.spec_json["strategy"], "stealth")

    def test_invalid_spec_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "sweep",
                metric="rho_L",
                alpha_start=0.3,
                alpha_stop=0.6,
                alpha_step=0.1,
                gamma_start=0.0,
                gamma_stop=1.0,
                gamma_step=0.5,
                level="2",
                stdout=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 2)
