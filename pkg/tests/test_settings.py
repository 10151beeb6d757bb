import io
import json
import os
from fractions import Fraction

import pytest

from src.core.extreal import INF
from src.errors import ConfigError
from src.handlers.report_writer import ReportWriter
from src.models import CertKind, OutputFormat
from src.settings.config import Settings
from src.settings.constants import DEFAULT_RUNS


def test_settings_defaults():
    settings = Settings.from_env({})
    assert settings.runs == DEFAULT_RUNS
    assert settings.workers == 0
    assert settings.resolved_workers() == (os.cpu_count() or 1)
    assert settings.output_format == "table"
    assert not settings.debug


def test_settings_from_environment():
    settings = Settings.from_env({"RPT_SEED": "5", "RPT_DEBUG": "yes", "RPT_WORKERS": "3", "RPT_OUTPUT_FORMAT": "json"})
    assert settings.seed == 5
    assert settings.debug
    assert settings.resolved_workers() == 3
    assert settings.output_format == "json"


def test_invalid_environment_value():
    with pytest.raises(ConfigError):
        Settings.from_env({"RPT_RUNS": "many"})


def test_workers_zero_uses_every_core():
    assert Settings(workers=0).resolved_workers() == (os.cpu_count() or 1)
    with pytest.raises(ConfigError):
        Settings(workers=-1).resolved_workers()


def sample_writer(output_format):
    stream = io.StringIO()
    writer = ReportWriter(output_format, stream)
    writer.set_header(tool="rpt", kind=CertKind.DB, skipped=None)
    writer.add_rows("values", [{"name": "h", "value": Fraction(27, 2)}, {"name": "longer", "value": INF}])
    writer.add_rows("empty", [])
    writer.add_text("note", "first line\nsecond line")
    writer.flush()
    return stream.getvalue()


def test_table_output():
    text = sample_writer(OutputFormat.TABLE)
    assert text.splitlines()[:2] == ["tool: rpt", "kind: db"]
    assert "name    value\nh       13.5\nlonger  inf\n" in text
    assert "== empty ==\n(none)\n" in text
    assert text.endswith("== note ==\nfirst line\nsecond line\n")


def test_csv_output():
    text = sample_writer(OutputFormat.CSV)
    assert text.startswith("# tool=rpt\n# kind=db\n# values\nname,value\nh,13.5\nlonger,inf\n")
    assert "# note\n# first line\n# second line\n" in text


def test_json_output():
    document = json.loads(sample_writer(OutputFormat.JSON))
    assert document["header"] == {"tool": "rpt", "kind": "db"}
    assert document["sections"][0] == {"title": "values", "content": [{"name": "h", "value": "13.5"}, {"name": "longer", "value": "inf"}]}
    assert document["sections"][2]["content"] == "first line\nsecond line"


def test_floats_are_rounded():
    stream = io.StringIO()
    writer = ReportWriter(OutputFormat.JSON, stream)
    writer.add_rows("x", [{"p": 1 / 3}])
    writer.flush()
    assert json.loads(stream.getvalue())["sections"][0]["content"][0]["p"] == 0.3333333333
