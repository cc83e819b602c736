"""
Test framework output grammars.

Each parser pulls (passing, failing) out of the summary a framework prints
at the end of a run. Parsing is best effort: output we can't make sense of
comes back as recognized=False with zero counts. When the summary appears
more than once (watch reruns, epilogues) the last one wins.
"""

import re
from typing import NamedTuple

_ANSI_RE = re.compile(r"\x1b\[[0-?]*[ -/]*[@-~]|\x1b\][^\x07\x1b]*(?:\x07|\x1b\\)")


class ParseResult(NamedTuple):
    num_passing: int
    num_failing: int
    recognized: bool


NOT_RECOGNIZED = ParseResult(0, 0, False)


def strip_ansi(text):
    return _ANSI_RE.sub("", text)


def _last(pattern, text):
    matches = list(pattern.finditer(text))
    return matches[-1] if matches else None


def _is_filler(gap, filler):
    return all(not line.strip() or (filler is not None and filler.match(line))
               for line in gap.split("\n"))


def _last_block(line_pattern, text, filler=None):
    """
    Counts from the last block of adjacent summary lines, keyed by kind.

    line_pattern matches a whole summary line with named groups count and
    kind. Lines of one block may be separated by blank lines or lines
    matching filler. A repeated kind belongs to an earlier block.
    """
    block = {}
    block_start = None
    for match in reversed(list(line_pattern.finditer(text))):
        if block_start is not None and not _is_filler(text[match.end():block_start], filler):
            break
        kind = match.group("kind")
        if kind in block:
            break
        block[kind] = int(match.group("count"))
        block_start = match.start()
    return block


# mocha:  "  3 passing (12ms)" / "  1 failing"
_MOCHA_PASSING = re.compile(r"^\s*(\d+) passing\b", re.M)
_MOCHA_FAILING = re.compile(r"^\s*(\d+) failing\b", re.M)


def parse_mocha(text):
    passing = _last(_MOCHA_PASSING, text)
    if passing is None:
        failing = _last(_MOCHA_FAILING, text)
        if failing is None:
            return NOT_RECOGNIZED
        return ParseResult(0, int(failing.group(1)), True)

    # the failing line belongs to this block only if it follows the passing line
    failing = _MOCHA_FAILING.search(text, passing.end())
    return ParseResult(int(passing.group(1)), int(failing.group(1)) if failing else 0, True)


# jest:  "Tests:       1 failed, 2 skipped, 3 passed, 6 total"
_JEST_TESTS = re.compile(r"^\s*Tests:\s+(.*\d+ total.*)$", re.M)
_JEST_PASSED = re.compile(r"(\d+) passed")
_JEST_FAILED = re.compile(r"(\d+) failed")


def parse_jest(text):
    line = _last(_JEST_TESTS, text)
    if line is None:
        return NOT_RECOGNIZED
    summary = line.group(1)
    passed = _JEST_PASSED.search(summary)
    failed = _JEST_FAILED.search(summary)
    return ParseResult(
        int(passed.group(1)) if passed else 0,
        int(failed.group(1)) if failed else 0,
        True,
    )


# jasmine:  "4 specs, 1 failure" / "5 specs, 0 failures, 1 pending spec"
_JASMINE = re.compile(r"\b(\d+) specs?, (\d+) failures?(?:, (\d+) pending specs?)?")


def parse_jasmine(text):
    summary = _last(_JASMINE, text)
    if summary is None:
        return NOT_RECOGNIZED
    specs, failures = int(summary.group(1)), int(summary.group(2))
    pending = int(summary.group(3) or 0)
    return ParseResult(max(specs - failures - pending, 0), failures, True)


# tap / tape:  "# pass  3" / "# fail  1", else count top-level ok / not ok lines
_TAP_SUMMARY = re.compile(r"^#\s+(?P<kind>pass|fail)\s+(?P<count>\d+)[ \t]*$", re.M)
_TAP_SUMMARY_FILLER = re.compile(r"^#\s+(?:tests|skip|todo)\s+\d+")
_TAP_POINT = re.compile(r"^(not )?ok\b[^#\n]*(#\s*(\w+))?", re.M)


def parse_tap(text):
    block = _last_block(_TAP_SUMMARY, text, _TAP_SUMMARY_FILLER)
    if block:
        return ParseResult(block.get("pass", 0), block.get("fail", 0), True)

    num_ok = num_not_ok = 0
    for point in _TAP_POINT.finditer(text):
        directive = (point.group(3) or "").upper()
        if directive in ("SKIP", "TODO"):
            continue
        if point.group(1):
            num_not_ok += 1
        else:
            num_ok += 1
    if num_ok or num_not_ok:
        return ParseResult(num_ok, num_not_ok, True)

    # node-tap's classic reporter prints a mocha-style summary
    return parse_mocha(text)


# ava:  "3 tests passed" / "1 test failed"
_AVA_SUMMARY = re.compile(r"^[^\w\n]*(?P<count>\d+) tests? (?P<kind>passed|failed)\b.*$", re.M)
_AVA_SUMMARY_FILLER = re.compile(
    r"^[^\w\n]*\d+ (?:known failures?|tests? skipped|tests? todo|uncaught exceptions?|unhandled rejections?)\b"
)


def parse_ava(text):
    block = _last_block(_AVA_SUMMARY, text, _AVA_SUMMARY_FILLER)
    if not block:
        return NOT_RECOGNIZED
    return ParseResult(block.get("passed", 0), block.get("failed", 0), True)


# lab:  "4 tests complete" / "1 of 4 tests failed" / "3 of 4 tests complete"
_LAB = re.compile(r"(?:(\d+) of (\d+)|(\d+)) tests? (complete|failed)")


def parse_lab(text):
    summary = _last(_LAB, text)
    if summary is None:
        return NOT_RECOGNIZED
    count_str, total_str, plain, verdict = summary.groups()
    if plain is not None:
        count = int(plain)
        return ParseResult(count, 0, True) if verdict == "complete" else ParseResult(0, count, True)

    count, total = int(count_str), int(total_str)
    if verdict == "failed":
        return ParseResult(max(total - count, 0), count, True)
    return ParseResult(count, max(total - count, 0), True)


PARSERS = {
    "mocha": parse_mocha,
    "jest": parse_jest,
    "jasmine": parse_jasmine,
    "tap": parse_tap,
    "ava": parse_ava,
    "lab": parse_lab,
}

# Signature sniffing order: most distinctive summaries first, tap's line
# counting is the loosest so it goes last
SNIFF_ORDER = ("jest", "jasmine", "lab", "ava", "mocha", "tap")


def sniff_framework(output):
    """
    Guess which framework produced output by trying every grammar.

    Returns:
        (framework id, ParseResult) for the first recognized grammar, or None.
    """
    text = strip_ansi(output)
    for framework in SNIFF_ORDER:
        result = PARSERS[framework](text)
        if result.recognized:
            return framework, result
    return None


def parse_framework_output(framework, output):
    """
    Count passing and failing tests in one framework's output.

    gulp is only a task runner, so its output is parsed with whichever
    grammar recognizes it.

    Returns:
        ParseResult(num_passing, num_failing, recognized).
    """
    if framework == "gulp":
        sniffed = sniff_framework(output)
        return sniffed[1] if sniffed else NOT_RECOGNIZED
    try:
        parser = PARSERS[framework]
    except KeyError:
        raise ValueError(f"no output grammar for framework {framework!r}") from None
    return parser(strip_ansi(output))
