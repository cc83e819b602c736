"""
Known JavaScript tooling and command classification.

Given a script's command string, works out which linters, coverage tools
and test frameworks it invokes and which other manifest scripts it
dispatches to.
"""

import re
import shlex
from dataclasses import dataclass, field
from fnmatch import fnmatchcase

# tool id -> executable names that invoke it
LINTERS = {
    "eslint": {"eslint"},
    "tslint": {"tslint"},
    # listed among the common linters but no known package; matched literally
    "xx": {"xx"},
    "standard": {"standard"},
    "prettier": {"prettier"},
    "gulp-lint": set(),  # "gulp <something lint>", handled below
}
COVERAGE_TOOLS = {
    "istanbul": {"istanbul"},
    "nyc": {"nyc"},
    "coveralls": {"coveralls"},
    "c8": {"c8"},
}
FRAMEWORKS = {
    "mocha": {"mocha", "_mocha"},
    "jest": {"jest"},
    "jasmine": {"jasmine"},
    "tap": {"tap"},
    "lab": {"lab"},
    "ava": {"ava"},
    "gulp": {"gulp"},
}

# Splits a command line into simple commands
_SEPARATORS = re.compile(r"&&|\|\||[;|&()]")
_RUN_ALL = {"npm-run-all", "run-s", "run-p"}


@dataclass
class Classification:
    linters: list = field(default_factory=list)
    coverage_tools: list = field(default_factory=list)
    frameworks: list = field(default_factory=list)
    nested: list = field(default_factory=list)

    @property
    def names_any_tool(self):
        return bool(self.linters or self.coverage_tools or self.frameworks)


def _split_simple_commands(command_string):
    for part in _SEPARATORS.split(command_string):
        try:
            tokens = shlex.split(part)
        except ValueError:
            # unbalanced quotes, fall back to whitespace
            tokens = part.split()
        if tokens:
            yield tokens


def _executable_name(token):
    """
    The tool name a token stands for, or None.

    Bare words count as themselves. Paths only count when they point into a
    node_modules tree or a bin directory, so `mocha test/lab` isn't lab.
    """
    if token.startswith("-") or "=" in token:
        return None
    if "/" not in token:
        return token
    if "node_modules" in token or "/bin/" in token or token.startswith("bin/"):
        base = token.rstrip("/").rsplit("/", 1)[-1]
        for ext in (".js", ".cjs", ".mjs", ".cmd"):
            if base.endswith(ext):
                base = base[: -len(ext)]
        return base
    return None


def _match_catalog(catalog, names):
    return [tool for tool, aliases in catalog.items() if aliases & names]


def _nested_scripts(tokens, script_names, self_name):
    """
    Scripts dispatched by one simple command (npm run S, yarn run S, yarn S, run-s a b).

    Returns the matched script names and the tokens that named them, which
    must not be mistaken for tool executables.
    """
    words = [t for t in tokens if not t.startswith("-")]
    # skip FOO=bar prefixes and env wrappers
    while words and ("=" in words[0] or words[0] in ("cross-env", "env", "npx")):
        words.pop(0)
    found, consumed = [], set()
    if not words:
        return found, consumed
    program = words[0]

    if program == "npm" and len(words) >= 2:
        if words[1] in ("run", "run-script") and len(words) >= 3:
            found.append(words[2])
            consumed.add(words[2])
        elif words[1] in ("test", "t"):
            found.append("test")
    elif program == "yarn" and len(words) >= 2:
        target = words[2] if words[1] == "run" and len(words) >= 3 else words[1]
        # yarn X runs the binary X when there is no script X
        if target in script_names:
            found.append(target)
            consumed.add(target)
    elif program in _RUN_ALL:
        for pattern in words[1:]:
            consumed.add(pattern)
            found.extend(n for n in script_names if fnmatchcase(n, pattern))

    return [n for n in found if n in script_names and n != self_name], consumed


def classify_command(script_name, command_string, all_script_names=()):
    """
    Classify one manifest script by looking at its command string.

    Tool ids come from token-level matches against the catalog; a command can
    be a linter, a coverage wrapper and a test run at the same time.

    Args:
        script_name: the script being classified.
        command_string: its command in package.json.
        all_script_names: every script in the manifest, for nested dispatch.

    Returns:
        Classification with lists in first-seen order.
    """
    script_names = list(dict.fromkeys(all_script_names))
    result = Classification()
    for tokens in _split_simple_commands(command_string):
        nested, consumed = _nested_scripts(tokens, script_names, script_name)
        names = {n for n in map(_executable_name, tokens) if n and n not in consumed}

        if "gulp" in names and any("lint" in t for t in tokens if t != "gulp"):
            if "gulp-lint" not in result.linters:
                result.linters.append("gulp-lint")
            names.discard("gulp")

        for tool in _match_catalog(LINTERS, names):
            if tool not in result.linters:
                result.linters.append(tool)
        for tool in _match_catalog(COVERAGE_TOOLS, names):
            if tool not in result.coverage_tools:
                result.coverage_tools.append(tool)
        for tool in _match_catalog(FRAMEWORKS, names):
            if tool not in result.frameworks:
                result.frameworks.append(tool)

        for name in nested:
            if name not in result.nested:
                result.nested.append(name)

    return result
