import csv
import io
import json
import math
from pathlib import Path

from core.services.params import DomainError
from sweeps.serializers import ReportRowSerializer, parse_rows
from sweeps.services.grid import AUX_COLUMNS

FORMATS = ("csv", "json")


def format_cell(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows, metric):
    aux_columns = AUX_COLUMNS.get(metric, ())
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["alpha", "gamma", "value", *aux_columns])
    for row in rows:
        writer.writerow(
            [format_cell(row.alpha), format_cell(row.gamma), format_cell(row.value)]
            + [format_cell(row.aux.get(name, "")) for name in aux_columns]
        )
    return buffer.getvalue()


def rows_to_json(rows):
    return json.dumps(ReportRowSerializer(rows, many=True).data, indent=2) + "\n"


def rows_from_json(text):
    return parse_rows(json.loads(text))


def render_rows(rows, metric, output_format):
    if output_format == "csv":
        return rows_to_csv(rows, metric)
    if output_format == "json":
        return rows_to_json(rows)
    raise DomainError(f"format must be one of {', '.join(FORMATS)} (got {output_format!r})")


def write_rows(rows, metric, output_format, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(render_rows(rows, metric, output_format))
    return path
