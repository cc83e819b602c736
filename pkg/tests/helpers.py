"""Test helpers shared by several test modules."""

import json
import os
import shutil
from collections import defaultdict

import pytest

from src.core.executor import ExecutionOutcome

HAVE_GIT = shutil.which("git") is not None
HAVE_NPM = shutil.which("npm") is not None

requires_git = pytest.mark.skipif(not HAVE_GIT, reason="git not installed")
requires_npm = pytest.mark.skipif(not (HAVE_GIT and HAVE_NPM), reason="git and npm needed")
requires_network = pytest.mark.skipif(
    os.environ.get("NPM_MINER_NETWORK") != "1", reason="set NPM_MINER_NETWORK=1 for networked tests"
)


def outcome(command="cmd", stdout="", stderr="", exit_status=0, timed_out=False, duration=5):
    return ExecutionOutcome(
        command=command,
        stdout=stdout,
        stderr=stderr,
        exit_status=None if timed_out else exit_status,
        timed_out=timed_out,
        duration=duration,
    )


class FakeRunner:
    """
    Stands in for run_command.

    responses maps a command string to a list of outcomes handed out in
    order (the last one repeats). Unknown commands succeed with no output.
    """

    def __init__(self, responses=None):
        self.responses = {k: list(v) for k, v in (responses or {}).items()}
        self.calls = []
        self._served = defaultdict(int)

    def __call__(self, command, cwd, timeout, extra_env=None):
        self.calls.append((command, cwd, timeout))
        queue = self.responses.get(command)
        if not queue:
            return outcome(command)
        index = min(self._served[command], len(queue) - 1)
        self._served[command] += 1
        result = queue[index]
        result.command = command
        return result

    @property
    def commands(self):
        return [c for c, _, _ in self.calls]


def write_package(root, scripts=None, files=None, manifest=None):
    """Write package.json (plus extra files) under root."""
    root.mkdir(parents=True, exist_ok=True)
    doc = manifest if manifest is not None else {"name": root.name, "version": "1.0.0", "scripts": scripts or {}}
    (root / "package.json").write_text(json.dumps(doc, indent=2))
    for rel, content in (files or {}).items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
