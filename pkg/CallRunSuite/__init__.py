# CallRunSuite/__init__.py
import logging

from vertexlab.config import build_run_config, load_settings
from vertexlab.reports import write_report
from vertexlab.suites import run_suite


def main(suite_name: str) -> str:
    logging.info(f"Running suite {suite_name}...")

    try:
        settings = load_settings()
        run_config = build_run_config(suite_name, {}, {}, settings)
        result = run_suite(suite_name, run_config.params, settings.n_jobs)
        write_report(result.report, run_config.output)
        logging.info(f"Suite {suite_name} result: {result.report.summary()}")
        return result.report.to_json()
    except Exception as e:
        logging.error(f"Failed to run suite {suite_name}: {e}", exc_info=True)
        raise
