import csv
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path

from shapes.exceptions import InputEncodingError, LabelError


@contextmanager
def atomic_write(path, encoding='utf-8'):
    """Open a temporary sibling of ``path`` for writing and move it into place on success.

    On any exception the temporary file is removed and ``path`` is left untouched.
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path('.')
    directory.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        'w', encoding=encoding, newline='', dir=directory, prefix=f'.{path.name}.', suffix='.tmp', delete=False,
    )
    try:
        with handle:
            yield handle
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.unlink(handle.name)
        raise


def read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as exc:
        raise InputEncodingError(f"{path}: not UTF-8 text (bad byte at offset {exc.start})") from None


def write_rows(path, header, rows):
    with atomic_write(path) as handle:
        writer = csv.writer(handle, lineterminator='\n')
        if header is not None:
            writer.writerow(header)
        writer.writerows(rows)


def read_labels(text):
    """Parse an ``id,class`` CSV into an ordered dict; a header row is skipped."""
    labels = {}
    for row in csv.reader(text.splitlines()):
        if not row or row[0].startswith('#'):
            continue
        if len(row) != 2:
            raise LabelError(f"Labels row must be 'id,class', got {row!r}")
        model_id, label = row[0].strip(), row[1].strip()
        if (model_id, label) == ('id', 'class'):
            continue
        labels[model_id] = label
    return labels
