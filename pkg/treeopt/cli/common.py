"""Helpers shared by the command modules."""

import argparse
import sys
from contextlib import contextmanager
from enum import IntEnum
from pathlib import Path

from treeopt.core.errors import InstanceFormatError
from treeopt.schemas.instance import Instance
from treeopt.services.graph import EliminationOrdering, parse_ordering
from treeopt.services.instance_io import parse_instance


class ExitCode(IntEnum):
    OK = 0
    INPUT_ERROR = 2
    INFEASIBLE = 3
    DISAGREEMENT = 4


def coef_range(text: str) -> tuple[int, int]:
    """argparse type for ``LO..HI``."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


def read_text(path: Path) -> str:
    """File contents as UTF-8; undecodable bytes are reported with their line."""
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise InstanceFormatError(f"{path}: invalid UTF-8 byte 0x{data[e.start]:02x}", line) from None


def read_instance(path: Path) -> Instance:
    return parse_instance(read_text(path))


def read_ordering(path: Path, n: int) -> EliminationOrdering:
    return parse_ordering(read_text(path), n)


@contextmanager
def open_output(path: Path | None):
    """Text stream for ``path``, or standard output when no path is given."""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8") as f:
        yield f


def error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)
