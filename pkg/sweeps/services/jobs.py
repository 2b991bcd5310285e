import logging
import math
import time
from pathlib import Path

from django.conf import settings
from django.utils import timezone

from core.services.params import DomainError
from sweeps.models import SweepJob
from sweeps.serializers import parse_spec
from sweeps.services.grid import run_sweep
from sweeps.services.output import FORMATS, write_rows

logger = logging.getLogger(__name__)


def enqueue_sweep(spec_data, output_format="csv", output_path=None):
    """Validate a sweep and store it as a pending job; nothing is evaluated here."""
    parse_spec(spec_data)
    if output_format not in FORMATS:
        raise DomainError(f"format must be one of {', '.join(FORMATS)} (got {output_format!r})")
    job = SweepJob.objects.create(spec_json=spec_data, output_format=output_format, output_path=output_path or "")
    if not job.output_path:
        job.output_path = str(Path(settings.FORKRISK_SWEEP_OUTPUT_DIR) / f"sweep-{job.id}.{output_format}")
        job.save(update_fields=["output_path"])
    logger.info("sweep job queued id=%s metric=%s", job.id, spec_data.get("metric"))
    return job


def claim_job(job_id, now=None):
    now = now or timezone.now()
    updated = SweepJob.objects.filter(id=job_id, status="pending").update(
        status="running",
        started_at=now,
    )
    return updated == 1


def run_job(job, cap, workers=1):
    started = time.monotonic()
    spec = parse_spec(job.spec_json)
    rows = run_sweep(spec, cap, workers)
    write_rows(rows, spec.metric, job.output_format, job.output_path)
    job.status = "success"
    job.summary_json = {
        "rows": len(rows),
        "infinite_values": sum(1 for row in rows if isinstance(row.value, float) and math.isinf(row.value)),
        "elapsed_seconds": round(time.monotonic() - started, 3),
    }
    job.finished_at = timezone.now()
    job.save(update_fields=["status", "summary_json", "finished_at"])
    logger.info("sweep job finished id=%s rows=%s", job.id, len(rows))
    return job


def fail_job(job, exc):
    job.status = "failed"
    job.error_message = str(exc)
    job.finished_at = timezone.now()
    job.save(update_fields=["status", "error_message", "finished_at"])
    logger.warning("sweep job failed id=%s error=%s", job.id, exc)
    return job
