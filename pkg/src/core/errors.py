"""
Exceptions raised by the analysis pipeline.

Only setup problems (bad config, unresolvable package, failed clone) are
raised. Everything that happens while running a package's own commands is
recorded as data in the results document instead.
"""


class MinerError(Exception):
    """Base class for everything the miner raises on purpose."""


class ConfigError(MinerError):
    """The configuration file is unreadable, malformed or out of range."""


class UsageError(MinerError):
    """Invalid combination of command-line arguments."""


class ResolutionError(MinerError):
    """Could not turn an npm package name into a repository link."""


class NoRepoLink(ResolutionError):
    """The package metadata advertises no repository."""


class NetworkFailure(ResolutionError):
    """The registry could not be reached, even after retrying."""


class ParseFailure(ResolutionError):
    """The registry answered with content we don't recognize."""


class AcquisitionError(MinerError):
    """Could not produce a working copy of the repository."""


class CloneFailure(AcquisitionError):
    pass


class CheckoutFailure(AcquisitionError):
    pass


class ExecutorEnvironmentError(MinerError):
    """The command could not even be started (missing cwd, no shell)."""


class ReportWriteError(MinerError):
    """The results file for one package could not be written."""
