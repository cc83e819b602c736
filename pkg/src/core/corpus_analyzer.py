"""
Loads a directory of results files and filters the corpus.

The usual question is "which of these packages have a test suite that
runs and passes?", e.g. to pick evaluation subjects for a JavaScript tool.
"""

import json
import logging
from pathlib import Path

import pandas as pd

from src.utils.reporting import RESULTS_SUFFIX

logger = logging.getLogger(__name__)

SCRIPT_COLUMNS = [
    "package", "script", "num_passing", "num_failing", "test_infras", "linters",
    "coverage_tools", "runs_new_user_tests", "timed_out", "installer_command",
    "install_ok", "build_ok", "setup_error",
]


def load_results_documents(results_dir):
    """
    Read every <package>__results.json under results_dir.

    Returns:
        dict package name -> parsed document. Unreadable files are skipped.
    """
    docs = {}
    for path in sorted(Path(results_dir).glob(f"*{RESULTS_SUFFIX}")):
        package = path.name[: -len(RESULTS_SUFFIX)]
        try:
            docs[package] = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("Skipping unreadable results file %s: %s", path, e)
    return docs


def _package_row(package, doc):
    installation = doc.get("installation") or {}
    build = doc.get("build")
    return {
        "package": package,
        "installer_command": installation.get("installer_command"),
        "install_ok": bool(installation) and not installation.get("ERROR", False),
        "build_ok": build is None or not (build.get("ERROR") or build.get("bailed")),
        "setup_error": doc.get("setup_error"),
    }


def results_to_frame(docs):
    """One row per (package, test script); packages without test scripts get a single empty row."""
    rows = []
    for package, doc in docs.items():
        base = _package_row(package, doc)
        testing = doc.get("testing") or {}
        if not testing:
            rows.append({**base, "script": None, "num_passing": 0, "num_failing": 0,
                         "test_infras": [], "linters": [], "coverage_tools": [],
                         "runs_new_user_tests": False, "timed_out": False})
            continue
        for script, report in testing.items():
            rows.append({
                **base,
                "script": script,
                "num_passing": report.get("num_passing", 0),
                "num_failing": report.get("num_failing", 0),
                "test_infras": report.get("test_infras", []),
                "linters": report.get("linters", []),
                "coverage_tools": report.get("coverage_tools", []),
                "runs_new_user_tests": report.get("runs_new_user_tests", False),
                "timed_out": report.get("timed_out", False),
            })
    return pd.DataFrame(rows, columns=SCRIPT_COLUMNS)


def load_results_frame(results_dir):
    return results_to_frame(load_results_documents(results_dir))


def _union(lists):
    return sorted({item for items in lists for item in items})


def package_totals(df):
    """
    Collapse script rows into one row per package.

    Returns:
        pd.DataFrame indexed 0..n with summed counts, merged tool lists and
        an Outcome label, sorted by most passing tests first.
    """
    if df.empty:
        return pd.DataFrame(columns=["package", "num_passing", "num_failing", "runs_tests",
                                     "timed_out", "test_infras", "install_ok", "build_ok",
                                     "setup_error", "Outcome"])

    totals = df.groupby("package", sort=False).agg(
        num_passing=("num_passing", "sum"),
        num_failing=("num_failing", "sum"),
        runs_tests=("runs_new_user_tests", "any"),
        timed_out=("timed_out", "any"),
        install_ok=("install_ok", "first"),
        build_ok=("build_ok", "first"),
        setup_error=("setup_error", "first"),
    ).reset_index()
    infras = {package: _union(lists) for package, lists in df.groupby("package")["test_infras"]}
    totals["test_infras"] = totals["package"].map(infras)
    totals["Outcome"] = totals.apply(classify_outcome, axis=1)
    return totals.sort_values(["num_passing", "package"], ascending=[False, True]).reset_index(drop=True)


def classify_outcome(row):
    """Coarse label for where a package's analysis ended up."""
    if isinstance(row["setup_error"], str) and not row["install_ok"]:
        return "Setup failed"
    if not row["install_ok"]:
        return "Install failed"
    if not row["runs_tests"]:
        return "No tests run"
    if row["num_failing"] > 0:
        return "Failing tests"
    if not row["build_ok"]:
        return "Passing (build issues)"
    return "All passing"


def filter_corpus(df, min_passing=1, allow_failing=False, frameworks=None, exclude_timed_out=True):
    """
    Pick packages suitable as evaluation subjects.

    Args:
        df: frame from load_results_frame.
        min_passing: minimum total passing tests.
        allow_failing: keep packages that have failing tests.
        frameworks: keep only packages using one of these frameworks (None = any).
        exclude_timed_out: drop packages with any timed-out test command.

    Returns:
        Sorted list of package names.
    """
    totals = package_totals(df)
    if totals.empty:
        return []

    keep = totals["runs_tests"] & (totals["num_passing"] >= min_passing)
    if not allow_failing:
        keep &= totals["num_failing"] == 0
    if exclude_timed_out:
        keep &= ~totals["timed_out"]
    if frameworks:
        wanted = set(frameworks)
        keep &= totals["test_infras"].apply(lambda infras: bool(wanted & set(infras)))
    return sorted(totals.loc[keep, "package"])
