"""Compiler backends behind one interface: program text in, error diagnostics out."""
from __future__ import annotations

import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from typing import NamedTuple

from ..lang import split_program
from .mock import mock_errors
from .patterns import UNKNOWN_ID, DiagnosticPatternTable


class BridgeError(RuntimeError):
    """The compiler could not be run; distinct from a program that has errors."""


@dataclass(frozen=True)
class Diagnostic:
    error_id: str
    line: int
    message: str


class CompileResult(NamedTuple):
    error_count: int
    diagnostics: tuple

    @property
    def ok(self):
        return self.error_count == 0

    @property
    def lines(self):
        return [d.line for d in self.diagnostics]


def _as_text(program) -> str:
    return program if isinstance(program, str) else "\n".join(program)


def _clip(line, n_lines):
    return min(max(line, 0), max(n_lines - 1, 0))


class MockCompiler:
    """Built-in checker for the C subset; pure and memoised."""

    name = "mock"

    def __init__(self, table: DiagnosticPatternTable = None, cache_size=100_000):
        self.table = table or DiagnosticPatternTable.default()
        self._cache: dict = {}
        self._cache_size = cache_size

    def __call__(self, program) -> CompileResult:
        text = _as_text(program)
        hit = self._cache.get(text)
        if hit is not None:
            return hit
        n = len(split_program(text))
        diags = tuple(Diagnostic(self.table.classify(msg), _clip(ln, n), msg)
                      for ln, _, msg in mock_errors(text))
        res = CompileResult(len(diags), diags)
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[text] = res
        return res


_DIAG_RE = re.compile(r"^(?P<file>.*?):(?P<line>\d+):(?:(?P<col>\d+):)?\s*(?:fatal )?error:\s*(?P<msg>.*)$")


class ExternalCompiler:
    """Runs a real compiler (``clang -fsyntax-only`` by default) on a temp file.

    The exit status is not trusted on its own: a non-zero status with no
    parseable ``error:`` line is reported as a :class:`BridgeError`.
    """

    def __init__(self, command="clang -fsyntax-only -Werror=unused-comparison", timeout=10.0,
                 table: DiagnosticPatternTable = None):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.table = table or DiagnosticPatternTable.default()
        self.name = "external:" + " ".join(self.command)

    def __call__(self, program) -> CompileResult:
        text = _as_text(program)
        fd, path = tempfile.mkstemp(suffix=".c")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
            try:
                proc = subprocess.run(self.command + [path], capture_output=True, text=True,
                                      timeout=self.timeout)
            except FileNotFoundError as exc:
                raise BridgeError(f"compiler not found: {self.command[0]}") from exc
            except subprocess.TimeoutExpired as exc:
                raise BridgeError(f"compiler timed out after {self.timeout}s") from exc
        finally:
            os.unlink(path)
        return self.parse_output(proc.stderr + proc.stdout, text, proc.returncode, path)

    def parse_output(self, output, text, returncode=0, path=None) -> CompileResult:
        n = len(split_program(text))
        diags = []
        for raw in output.splitlines():
            m = _DIAG_RE.match(raw)
            if m is None or (path is not None and os.path.basename(m["file"]) != os.path.basename(path)):
                continue
            msg = m["msg"].strip()
            # strip a trailing warning-flag tag such as [-Werror,-Wunused-comparison]
            msg = re.sub(r"\s*\[-W[^\]]*\]$", "", msg)
            diags.append(Diagnostic(self.table.classify(msg), _clip(int(m["line"]) - 1, n), msg))
        if returncode != 0 and not diags:
            raise BridgeError(f"compiler exited with status {returncode} but reported no errors")
        return CompileResult(len(diags), tuple(diags))


def compile_mock(program) -> CompileResult:
    return _DEFAULT_MOCK(program)


def compile_external(program, command="clang -fsyntax-only -Werror=unused-comparison", timeout=10.0):
    return ExternalCompiler(command, timeout)(program)


def make_bridge(spec: str = "mock"):
    """Backend from a CLI string: ``mock`` or ``external:<command>``."""
    if spec == "mock":
        return MockCompiler()
    if spec.startswith("external"):
        cmd = spec.partition(":")[2].strip()
        return ExternalCompiler(cmd) if cmd else ExternalCompiler()
    raise ValueError(f"unknown compiler backend {spec!r}")


_DEFAULT_MOCK = MockCompiler()

__all__ = ["BridgeError", "Diagnostic", "CompileResult", "MockCompiler", "ExternalCompiler",
           "compile_mock", "compile_external", "make_bridge", "DiagnosticPatternTable", "UNKNOWN_ID"]
