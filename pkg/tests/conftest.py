"""Shared fixtures: throwaway git packages, configs and working copies."""

import os
import subprocess

import pytest

from src.core.acquisition import WorkingCopy
from src.core.config import AnalysisConfig
from tests.helpers import write_package


@pytest.fixture
def cfg():
    return AnalysisConfig()


@pytest.fixture
def working_copy(tmp_path):
    """An empty working copy directory (no git)."""
    root = tmp_path / "pkg"
    root.mkdir()
    return WorkingCopy(root=root, repo_url=str(root))


GIT_IDENTITY = {
    "GIT_AUTHOR_NAME": "fixture", "GIT_AUTHOR_EMAIL": "fixture@example.com",
    "GIT_COMMITTER_NAME": "fixture", "GIT_COMMITTER_EMAIL": "fixture@example.com",
}


def _git(root, *args):
    result = subprocess.run(["git", *args], cwd=root, check=True, capture_output=True, text=True,
                            env={**os.environ, **GIT_IDENTITY})
    return result.stdout.strip()


def commit_all(root, message="commit"):
    _git(root, "add", "-A")
    _git(root, "commit", "--quiet", "-m", message)
    return _git(root, "rev-parse", "HEAD")


@pytest.fixture
def make_package(tmp_path):
    """
    Build a local git repository holding a package.json.

    Returns a function (name, scripts, files, manifest) -> (repo path, head sha).
    """
    def _make(name="fixture-pkg", scripts=None, files=None, manifest=None):
        root = tmp_path / "repos" / name
        write_package(root, scripts, files, manifest)
        _git(root, "init", "--quiet")
        sha = commit_all(root, "initial")
        return root, sha

    return _make


@pytest.fixture
def add_commit():
    """Commit extra files to an existing fixture repo; returns the new sha."""
    def _add(root, files):
        for rel, content in files.items():
            (root / rel).write_text(content)
        return commit_all(root, "more")

    return _add
