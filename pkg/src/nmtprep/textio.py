"""Line-oriented UTF-8 reading and writing shared by every module."""

import io
import sys
from pathlib import Path


class InputError(ValueError):
    """Malformed or inconsistent user input (CLI exit status 1)."""


def decode_lines(chunks):
    """Yield decoded lines (newline stripped) from an iterable of byte lines.

    Raises InputError naming the absolute byte offset of the first invalid
    UTF-8 sequence.
    """
    offset = 0
    for raw in chunks:
        if isinstance(raw, str):
            yield raw.rstrip("\n")
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(
                f"invalid UTF-8 at byte offset {offset + exc.start}"
            ) from None
        offset += len(raw)
        yield text[:-1] if text.endswith("\n") else text


def read_lines(source):
    """Read all lines from a path, '-' (stdin) or an open binary/text stream."""
    if source is None or source == "-":
        return list(decode_lines(sys.stdin.buffer))
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        with open(path, "rb") as fh:
            return list(decode_lines(fh))
    return list(decode_lines(source))


def count_lines(path):
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    with open(path, "rb") as fh:
        return sum(1 for _ in fh)


def write_lines(dest, lines):
    """Write lines, each terminated by '\\n', to a path or '-' (stdout)."""
    data = "".join(line + "\n" for line in lines).encode("utf-8")
    if dest is None or dest == "-":
        out = sys.stdout
        if isinstance(out, io.TextIOWrapper):
            out.flush()
            out.buffer.write(data)
            out.buffer.flush()
        else:
            out.write(data.decode("utf-8"))
        return
    with open(dest, "wb") as fh:
        fh.write(data)
