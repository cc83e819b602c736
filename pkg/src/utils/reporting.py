"""
Results document.

Collects what each phase produced into one hierarchical document and
writes it as `<package>__results.json`.
"""

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from src.core.errors import ReportWriteError

logger = logging.getLogger(__name__)

RESULTS_SUFFIX = "__results.json"


@dataclass
class ResultsDocument:
    """
    Per-package results. A section stays None when its phase didn't run,
    and None sections are left out of the JSON.
    """
    installation: object = None   # InstallReport
    dependencies: list | None = None
    build: object = None          # BuildReport
    testing: dict | None = None   # script name -> TestCommandReport
    scripts_over_code: list | None = None  # ScriptRun
    ql_queries: list | None = None         # QueryRun
    metadata: dict = field(default_factory=dict)
    setup_error: str | None = None

    def to_dict(self, verbose=False):
        data = {}
        if self.installation is not None:
            data["installation"] = self.installation.to_dict(verbose)
        if self.dependencies is not None:
            data["dependencies"] = list(self.dependencies)
        if self.build is not None:
            data["build"] = self.build.to_dict(verbose)
        if self.testing is not None:
            data["testing"] = {name: r.to_dict(verbose) for name, r in self.testing.items()}
        if self.scripts_over_code is not None:
            data["scripts_over_code"] = [run.to_dict() for run in self.scripts_over_code]
        if self.ql_queries is not None:
            data["QL_queries"] = [run.to_dict() for run in self.ql_queries]
        if self.setup_error is not None:
            data["setup_error"] = self.setup_error
        data["metadata"] = dict(self.metadata)
        return data


def safe_file_stem(package_name):
    """Scoped names (@scope/name) can't go into a filename as-is."""
    return package_name.replace("/", "-")


class ResultsNamer:
    """
    Hands out results-file stems within one batch.

    The second package called memfs becomes memfs_1, and so on, so two
    analyses never overwrite each other's results.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._claimed = set()

    def claim(self, package_name):
        stem = safe_file_stem(package_name)
        with self._lock:
            candidate, suffix = stem, 0
            while candidate in self._claimed:
                suffix += 1
                candidate = f"{stem}_{suffix}"
            self._claimed.add(candidate)
            return candidate


def results_file_name(stem):
    return f"{stem}{RESULTS_SUFFIX}"


def write_results(doc, package_name, output_dir, verbose=False, namer=None):
    """
    Serialize doc to <output_dir>/<package>__results.json.

    Args:
        doc: ResultsDocument.
        package_name: npm name or the repo's last path segment.
        output_dir: created if missing.
        verbose: embed full command output.
        namer: ResultsNamer shared by a batch; without one the stem is used as-is.

    Returns:
        Path of the written file.

    Raises:
        ReportWriteError: the file could not be written.
    """
    stem = namer.claim(package_name) if namer else safe_file_stem(package_name)
    path = Path(output_dir) / results_file_name(stem)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc.to_dict(verbose), indent=4) + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportWriteError(f"could not write {path}: {e}") from e

    logger.info("Wrote %s", path)
    return path
