from django.conf import settings
from django.core.management.base import CommandError

from core.management.base import DOMAIN_EXIT, AnalysisCommand
from sweeps.serializers import SweepJobSerializer, parse_spec
from sweeps.services.grid import METRICS, run_sweep
from sweeps.services.jobs import enqueue_sweep
from sweeps.services.output import FORMATS, render_rows, write_rows


class Command(AnalysisCommand):
    help = "Evaluate a metric over an alpha x gamma grid and write CSV or JSON rows."

    def add_command_arguments(self, parser):
        parser.add_argument("--metric", required=True, help=f"One of {', '.join(METRICS)}.")
        parser.add_argument("--alpha-start", type=float, required=True, dest="alpha_start")
        parser.add_argument("--alpha-stop", type=float, required=True, dest="alpha_stop")
        parser.add_argument("--alpha-step", type=float, required=True, dest="alpha_step")
        parser.add_argument("--gamma-start", type=float, required=True, dest="gamma_start")
        parser.add_argument("--gamma-stop", type=float, required=True, dest="gamma_stop")
        parser.add_argument("--gamma-step", type=float, required=True, dest="gamma_step")
        parser.add_argument("--level", help="Fixed level for rho_L, sigma_S and normalized_ratio.")
        parser.add_argument("--k", type=int, help="Confirmation depth for the double-spending metrics.")
        parser.add_argument("--strategy", help="stubborn or stealth, for service, r_star and normalized_ratio.")
        parser.add_argument("--cap", type=int, default=None)
        parser.add_argument("--out", help="Output file; rows go to stdout when omitted.")
        parser.add_argument("--format", default="csv", dest="output_format", help=f"One of {', '.join(FORMATS)}.")
        parser.add_argument("--enqueue", action="store_true", help="Store a pending job instead of running now.")

    def spec_data(self, options):
        data = {
            name: options[name]
            for name in (
                "metric",
                "alpha_start",
                "alpha_stop",
                "alpha_step",
                "gamma_start",
                "gamma_stop",
                "gamma_step",
            )
        }
        for name in ("level", "k", "strategy"):
            if options.get(name) is not None:
                data[name] = options[name]
        return data

    def run(self, options):
        data = self.spec_data(options)
        output_format = options["output_format"]
        if output_format not in FORMATS:
            raise CommandError(f"format must be one of {', '.join(FORMATS)}", returncode=DOMAIN_EXIT)
        if options["enqueue"]:
            job = enqueue_sweep(data, output_format, options.get("out"))
            self.stderr.write(self.style.SUCCESS(f"Job {job.id} queued"))
            return dict(SweepJobSerializer(job).data)

        spec = parse_spec(data)
        rows = run_sweep(spec, options["cap"] or settings.FORKRISK_SCAN_CAP, options["workers"])
        if not options.get("out"):
            self.stdout.write(render_rows(rows, spec.metric, output_format), ending="")
            return None
        try:
            path = write_rows(rows, spec.metric, output_format, options["out"])
        except OSError as exc:
            raise CommandError(f"cannot write {options['out']}: {exc}", returncode=DOMAIN_EXIT) from exc
        return {"metric": spec.metric, "rows": len(rows), "format": output_format, "output": str(path)}
