import logging
import azure.functions as func
import json

from vertexlab.config import ALL_SUITES, build_run_config, load_settings, parse_value
from vertexlab.errors import ConfigError, VertexLabError
from vertexlab.reports import write_report
from vertexlab.suites import run_suite

logger = logging.getLogger("azure")
logger.setLevel(logging.INFO)


def collect_params(req: func.HttpRequest) -> dict:
    """Merge query-string and JSON-body parameters; body values win."""
    raw = {k: v for k, v in req.params.items() if k != "check"}
    try:
        body = req.get_json()
    except ValueError:
        body = None
    if isinstance(body, dict):
        raw.update({k: v for k, v in body.items() if k != "check"})
    return {key: parse_value(key, str(value)) for key, value in raw.items()}


def main(req: func.HttpRequest) -> func.HttpResponse:
    logger.info("Function RunCheck started")

    check = req.params.get("check")
    if not check:
        try:
            body = req.get_json()
            check = body.get("check") if isinstance(body, dict) else None
        except ValueError:
            check = None

    if check not in ALL_SUITES:
        return func.HttpResponse(
            json.dumps({"error": f"Unknown check '{check}'", "available": ALL_SUITES}),
            status_code=400,
            mimetype="application/json"
        )

    try:
        settings = load_settings()
        run_config = build_run_config(check, {}, collect_params(req), settings)
    except ConfigError as e:
        logger.error(f"Invalid parameters for {check}: {e}", exc_info=True)
        return func.HttpResponse(json.dumps({"error": str(e)}), status_code=400, mimetype="application/json")

    try:
        result = run_suite(check, run_config.params, settings.n_jobs)
        write_report(result.report, run_config.output)
        logger.info(f"RunCheck finished: {result.report.summary()}")
        return func.HttpResponse(result.report.to_json(), mimetype="application/json")

    except VertexLabError as e:
        logger.error(f"Check {check} failed: {e}", exc_info=True)
        return func.HttpResponse(json.dumps({"error": str(e), "check": check}), status_code=500, mimetype="application/json")
    except Exception as e:
        logger.error(f"Processing error: {e}", exc_info=True)
        return func.HttpResponse(f"Error: {str(e)}", status_code=500)
