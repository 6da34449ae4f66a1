from importlib.resources import files
import json
import logging
import time
from typing import Any, Dict

import jsonschema

logger = logging.getLogger(__name__)


def load_report_schema() -> Dict[str, Any]:
    schema_file = files("chainsemi").joinpath("report-schema.json")
    with schema_file.open("r") as f:
        return json.load(f)


def validate_report(report: dict) -> None:
    """Validate a report envelope before it is written.

    This accepts the dictionary produced by
    `chainsemi.reports.Envelope.to_json_dict()` and checks it against the
    JSON schema packaged with chainsemi. A `jsonschema.ValidationError` is
    raised if it does not conform.
    """
    start = time.time()
    schema = load_report_schema()
    # Check the schema itself is valid
    jsonschema.Draft7Validator.check_schema(schema)
    loaded_schema = time.time()
    jsonschema.validate(instance=report, schema=schema)
    logger.debug(
        f"Report validated OK (schema: {loaded_schema - start:.3f}s, "
        f"report: {time.time() - loaded_schema:.3f}s)"
    )
