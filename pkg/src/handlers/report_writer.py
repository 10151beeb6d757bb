import csv
import json
import sys
from enum import Enum
from fractions import Fraction
from typing import TextIO

from src.core.extreal import ExtReal
from src.language.printer import format_number
from src.models import OutputFormat


def _cell(value) -> str | int | float | None:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return format_number(value)
    if isinstance(value, ExtReal):
        return str(value)
    if isinstance(value, float):
        return float(f"{value:.10g}")
    if value is None or isinstance(value, (str, int)):
        return value
    return str(value)


class ReportWriter:
    """
    Collects a header and titled sections, then renders them as an aligned table,
    CSV blocks or one JSON document carrying the same content.
    """

    def __init__(self, output_format: OutputFormat = OutputFormat.TABLE, stream: TextIO | None = None):
        self.output_format = OutputFormat(output_format)
        self.stream = stream or sys.stdout
        self.header: dict[str, object] = {}
        self.sections: list[tuple[str, list[dict] | str]] = []

    def set_header(self, **fields) -> None:
        self.header.update({key: _cell(value) for key, value in fields.items() if value is not None})

    def add_rows(self, title: str, rows: list[dict]) -> None:
        self.sections.append((title, [{key: _cell(value) for key, value in row.items()} for row in rows]))

    def add_text(self, title: str, text: str) -> None:
        self.sections.append((title, text))

    def flush(self) -> None:
        if self.output_format is OutputFormat.JSON:
            self._write_json()
        elif self.output_format is OutputFormat.CSV:
            self._write_csv()
        else:
            self._write_table()
        self.sections.clear()

    def _write_json(self) -> None:
        document = {"header": self.header, "sections": [{"title": title, "content": body} for title, body in self.sections]}
        json.dump(document, self.stream, indent=2, sort_keys=False)
        self.stream.write("\n")

    def _write_csv(self) -> None:
        for key, value in self.header.items():
            self.stream.write(f"# {key}={value}\n")
        for title, body in self.sections:
            self.stream.write(f"# {title}\n")
            if isinstance(body, str):
                for line in body.splitlines():
                    self.stream.write(f"# {line}\n")
                continue
            if not body:
                continue
            writer = csv.DictWriter(self.stream, fieldnames=list(body[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(body)

    def _write_table(self) -> None:
        for key, value in self.header.items():
            self.stream.write(f"{key}: {value}\n")
        for title, body in self.sections:
            self.stream.write(f"\n== {title} ==\n")
            if isinstance(body, str):
                self.stream.write(body if body.endswith("\n") else body + "\n")
                continue
            if not body:
                self.stream.write("(none)\n")
                continue
            columns = list(body[0])
            cells = [[("" if row.get(col) is None else str(row.get(col))) for col in columns] for row in body]
            widths = [max(len(col), *(len(line[i]) for line in cells)) for i, col in enumerate(columns)]
            self.stream.write("  ".join(col.ljust(w) for col, w in zip(columns, widths)).rstrip() + "\n")
            for line in cells:
                self.stream.write("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() + "\n")
