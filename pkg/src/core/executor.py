"""
Runs one external command with a hard timeout.

Commands go through the platform shell (npm scripts are shell snippets) in
their own process group, so a timeout takes down the whole tree: npm, node,
and whatever the test runner forked.
"""

import logging
import os
import signal
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

from src.core.errors import ExecutorEnvironmentError

logger = logging.getLogger(__name__)

# Extra time allowed for tearing down the process group after a timeout
KILL_GRACE_SECONDS = 1.0

# Watch modes and interactive prompts would otherwise hang until the timeout
CI_ENVIRONMENT = {"CI": "true"}


@dataclass
class ExecutionOutcome:
    """Captured result of one command. exit_status is None iff it timed out."""
    command: str
    stdout: str
    stderr: str
    exit_status: int | None
    timed_out: bool
    duration: int  # ms

    @property
    def succeeded(self):
        return not self.timed_out and self.exit_status == 0

    @property
    def combined_output(self):
        # several frameworks print their summary on stderr
        return self.stdout + "\n" + self.stderr

    def to_dict(self):
        return {
            "command": self.command,
            "exit_status": self.exit_status,
            "timed_out": self.timed_out,
            "duration_ms": self.duration,
            "stdout": self.stdout,
            "stderr": self.stderr,
        }


def _kill_process_group(proc):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        # group already gone
        pass


def _decode(data):
    return (data or b"").decode("utf-8", errors="replace")


def run_command(command, cwd, timeout, extra_env=None):
    """
    Run a shell command in cwd, killing its whole process tree after timeout ms.

    Args:
        command: shell command string.
        cwd: working directory, must exist.
        timeout: milliseconds, strictly positive.
        extra_env: variables added on top of the inherited environment.

    Returns:
        ExecutionOutcome. A failing or hanging command is data, not an exception.

    Raises:
        ExecutorEnvironmentError: cwd missing or the shell can't be started.
    """
    if timeout <= 0:
        raise ValueError(f"timeout must be positive, got {timeout}")
    if not Path(cwd).is_dir():
        raise ExecutorEnvironmentError(f"working directory does not exist: {cwd}")

    env = dict(os.environ)
    env.update(CI_ENVIRONMENT)
    if extra_env:
        env.update(extra_env)

    logger.debug("Running %r in %s (timeout %d ms)", command, cwd, timeout)
    started = time.monotonic()
    try:
        proc = subprocess.Popen(
            command,
            shell=True,
            cwd=str(cwd),
            env=env,
            stdin=subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=True,  # own process group for killpg
        )
    except OSError as e:
        raise ExecutorEnvironmentError(f"could not start shell for {command!r}: {e}") from e

    timed_out = False
    try:
        out, err = proc.communicate(timeout=timeout / 1000)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_process_group(proc)
        try:
            # retrying communicate keeps what was already read
            out, err = proc.communicate(timeout=KILL_GRACE_SECONDS)
        except subprocess.TimeoutExpired as e:
            # a descendant left the group and still holds our pipes
            logger.warning("Output pipes of %r still open after kill", command)
            out, err = e.stdout, e.stderr
            try:
                proc.kill()
                proc.wait()
            finally:
                for pipe in (proc.stdout, proc.stderr):
                    if pipe is not None:
                        pipe.close()

    duration = int((time.monotonic() - started) * 1000)
    outcome = ExecutionOutcome(
        command=command,
        stdout=_decode(out),
        stderr=_decode(err),
        exit_status=None if timed_out else proc.returncode,
        timed_out=timed_out,
        duration=duration,
    )

    if timed_out:
        logger.info("Command %r timed out after %d ms", command, duration)
    else:
        logger.debug("Command %r exited %d after %d ms", command, proc.returncode, duration)
    return outcome
