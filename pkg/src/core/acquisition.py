"""
Clone a repository into a fresh working directory and clean it up afterward.
"""

import logging
import shlex
import shutil
from dataclasses import dataclass
from pathlib import Path

from src.core.errors import CheckoutFailure, CloneFailure
from src.core.executor import run_command
from src.core.resolution import repo_name_from_url

logger = logging.getLogger(__name__)

CLONE_TIMEOUT_MS = 300_000
GIT_TIMEOUT_MS = 60_000

# Never stop to ask for credentials (nonexistent GitHub repos prompt for them)
GIT_ENVIRONMENT = {"GIT_TERMINAL_PROMPT": "0"}


@dataclass(frozen=True)
class WorkingCopy:
    root: Path
    repo_url: str
    commit_sha: str | None = None


def _claim_directory(dest_parent, name):
    """Create and return an empty directory named after the repo, uniquified on collision."""
    dest_parent = Path(dest_parent).resolve()
    dest_parent.mkdir(parents=True, exist_ok=True)
    candidate = dest_parent / name
    suffix = 0
    while True:
        try:
            # mkdir is atomic, so concurrent analyses never share a directory
            candidate.mkdir()
            return candidate
        except FileExistsError:
            suffix += 1
            candidate = dest_parent / f"{name}_{suffix}"


def _git(args, cwd, timeout=GIT_TIMEOUT_MS):
    return run_command(shlex.join(["git", *args]), cwd, timeout, extra_env=GIT_ENVIRONMENT)


def _failure_detail(outcome):
    if outcome.timed_out:
        return f"timed out after {outcome.duration} ms"
    return outcome.stderr.strip() or f"exit status {outcome.exit_status}"


def clone_repo(repo, dest_parent, commit_sha=None, timeout=CLONE_TIMEOUT_MS):
    """
    Clone repo under dest_parent, optionally pinned to commit_sha.

    Unpinned clones are shallow. Pinned ones fetch full history because an
    arbitrary commit may not be reachable from a depth-1 clone.

    Returns:
        WorkingCopy whose commit_sha is the full checked-out HEAD when pinned.

    Raises:
        CloneFailure, CheckoutFailure. The half-made directory is removed first.
    """
    root = _claim_directory(dest_parent, repo_name_from_url(repo.url))
    logger.info("Cloning %s into %s", repo.url, root)

    clone_args = ["clone", "--quiet"]
    if commit_sha is None:
        clone_args += ["--depth", "1"]
    outcome = _git([*clone_args, repo.url, str(root)], root.parent, timeout)
    if not outcome.succeeded:
        shutil.rmtree(root, ignore_errors=True)
        raise CloneFailure(f"could not clone {repo.url}: {_failure_detail(outcome)}")

    if commit_sha is None:
        return WorkingCopy(root=root, repo_url=repo.url)

    checkout = _git(["checkout", "--quiet", commit_sha], root)
    head = _git(["rev-parse", "HEAD"], root)
    resolved = head.stdout.strip()
    if not checkout.succeeded or not head.succeeded or not resolved.startswith(commit_sha.lower()):
        shutil.rmtree(root, ignore_errors=True)
        raise CheckoutFailure(f"could not check out {commit_sha} in {repo.url}: "
                              f"{_failure_detail(checkout)}")

    logger.info("Checked out %s at %s", repo.url, resolved)
    return WorkingCopy(root=root, repo_url=repo.url, commit_sha=resolved)


def cleanup(wc, rm_after_cloning):
    """Remove the working copy when asked to. Failures only warn."""
    if not rm_after_cloning:
        return
    if not wc.root.exists():
        logger.warning("Working copy %s already removed", wc.root)
        return
    try:
        shutil.rmtree(wc.root)
        logger.debug("Removed working copy %s", wc.root)
    except OSError as e:
        logger.warning("Could not remove working copy %s: %s", wc.root, e)
