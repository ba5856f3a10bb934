# orchestrator_function/__init__.py
import azure.durable_functions as df
import json
import logging

from vertexlab.config import load_settings


def orchestrator_function(context: df.DurableOrchestrationContext):
    logging.info("Orchestrator started")

    try:
        suites = list(load_settings().suites)
        logging.info(f"Fanning out {len(suites)} suites: {suites}")
        tasks = [context.call_activity("CallRunSuite", name) for name in suites]
        results = yield context.task_all(tasks)

        reports = {name: json.loads(result) for name, result in zip(suites, results)}
        failed = [name for name, report in reports.items() if not report.get("passed")]
        logging.info(f"All suites completed; failing: {failed}")
        return {"reports": reports, "failed": failed}

    except Exception as e:
        logging.error(f"Orchestration failed: {e}", exc_info=True)
        return {"error": str(e)}

main = df.Orchestrator.create(orchestrator_function)
