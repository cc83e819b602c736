"""
User scripts and static-analysis queries over a package's source.

The query engine (CodeQL by default) is an external command; we build one
source database per package, run each query against it, and decode the
results into `<package>__<query>__results.csv`.
"""

import logging
import os
import shlex
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

from src.core.executor import run_command
from src.utils.reporting import safe_file_stem

logger = logging.getLogger(__name__)


@dataclass
class ScriptRun:
    script: str
    outcome: object = None  # ExecutionOutcome
    error: str | None = None

    def to_dict(self):
        data = {"script": self.script}
        if self.outcome is not None:
            data.update(self.outcome.to_dict())
        if self.error is not None:
            data["ERROR"] = self.error
        return data


@dataclass
class QueryRun:
    query: str
    csv_path: str | None = None
    error: str | None = None

    def to_dict(self):
        data = {"query": self.query, "results_file": self.csv_path}
        if self.error is not None:
            data["ERROR"] = self.error
        return data


def query_csv_name(package_name, query_path):
    return f"{safe_file_stem(package_name)}__{Path(query_path).stem}__results.csv"


def run_scripts_over_code(wc, script_paths, cfg, runner=run_command):
    """Run each user script with cwd = the working copy, in the given order."""
    runs = []
    for script in script_paths:
        path = Path(script).expanduser().resolve()
        if not path.is_file():
            logger.warning("User script %s not found", script)
            runs.append(ScriptRun(script=script, error=f"script not found: {script}"))
            continue

        # scripts without the executable bit still run, through sh
        argv = [str(path)] if os.access(path, os.X_OK) else ["sh", str(path)]
        outcome = runner(shlex.join(argv), wc.root, cfg.test_timeout)
        logger.info("User script %s exited %s", script, outcome.exit_status)
        runs.append(ScriptRun(script=script, outcome=outcome))
    return runs


def _engine_error(outcome):
    if outcome.timed_out:
        return f"timed out after {outcome.duration} ms"
    return (outcome.stderr.strip() or outcome.stdout.strip() or
            f"exit status {outcome.exit_status}")[-2000:]


def run_ql_queries(wc, query_paths, package_name, output_dir, cfg, runner=run_command):
    """
    Evaluate static-analysis queries over the working copy.

    Engine failures (missing binary, database build, query compile) are
    recorded on each affected entry and never raised.
    """
    if not query_paths:
        return []

    engine = shlex.split(cfg.codeql_command)
    if shutil.which(engine[0]) is None:
        logger.warning("Static-analysis engine %r not found on PATH", engine[0])
        return [QueryRun(query=q, error=f"analysis engine {engine[0]!r} not found")
                for q in query_paths]

    output_dir = Path(output_dir).resolve()
    output_dir.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=f"{safe_file_stem(package_name)}__ql_"))
    database = scratch / "db"
    try:
        created = runner(
            shlex.join([*engine, "database", "create", str(database),
                        "--language=javascript", f"--source-root={wc.root}", "--overwrite"]),
            wc.root, cfg.test_timeout,
        )
        if not created.succeeded:
            detail = f"database creation failed: {_engine_error(created)}"
            logger.warning("Query database for %s: %s", package_name, detail)
            return [QueryRun(query=q, error=detail) for q in query_paths]

        runs = []
        for query in query_paths:
            query_file = Path(query).expanduser().resolve()
            bqrs = scratch / f"{query_file.stem}.bqrs"
            csv_path = output_dir / query_csv_name(package_name, query)

            evaluated = runner(
                shlex.join([*engine, "query", "run", str(query_file),
                            f"--database={database}", f"--output={bqrs}"]),
                wc.root, cfg.test_timeout,
            )
            if not evaluated.succeeded:
                runs.append(QueryRun(query=query, error=f"query failed: {_engine_error(evaluated)}"))
                continue

            decoded = runner(
                shlex.join([*engine, "bqrs", "decode", "--format=csv",
                            f"--output={csv_path}", str(bqrs)]),
                wc.root, cfg.test_timeout,
            )
            if not decoded.succeeded:
                runs.append(QueryRun(query=query, error=f"decode failed: {_engine_error(decoded)}"))
                continue

            logger.info("Query %s results in %s", query, csv_path)
            runs.append(QueryRun(query=query, csv_path=str(csv_path)))
        return runs
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
