from django.conf import settings
from django.core.management.base import BaseCommand

from sweeps.models import SweepJob
from sweeps.services.jobs import claim_job, fail_job, run_job


class Command(BaseCommand):
    help = "Run pending sweep jobs."

    def add_arguments(self, parser):
        parser.add_argument("--job-id", type=int)
        parser.add_argument("--workers", type=int, default=None)

    def handle(self, *args, **options):
        workers = options.get("workers") or settings.FORKRISK_WORKERS
        jobs = SweepJob.objects.filter(status="pending").order_by("created_at")
        if options.get("job_id"):
            jobs = jobs.filter(id=options["job_id"])
        if not jobs.exists():
            self.stdout.write(self.style.SUCCESS("No pending sweep jobs found"))
            return
        for job in jobs:
            if not claim_job(job.id):
                continue
            job.refresh_from_db()
            try:
                run_job(job, settings.FORKRISK_SCAN_CAP, workers)
                self.stdout.write(self.style.SUCCESS(f"Job {job.id} completed: {job.output_path}"))
            except Exception as exc:
                fail_job(job, exc)
                self.stderr.write(self.style.ERROR(f"Job {job.id} failed: {exc}"))
