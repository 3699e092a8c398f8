"""
File management utilities for topo-sft.

Provides atomic writes, JSON load/save and clobber protection for every
file the command-line tools produce.
"""

import json
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Union

from ..utils.exceptions import DatasetFormatError
from ..utils.validators import validate_input_file, validate_output_path


class FileManager:
    """Manages file operations with safety and atomicity."""

    def __init__(self, force: bool = False):
        """
        Initialize the file manager.

        Args:
            force: Whether existing outputs may be overwritten
        """
        self.force = force
        self.logger = logging.getLogger(__name__)

    def ensure_directory(self, directory: Union[str, Path]) -> Path:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def check_writable(self, file_path: Union[str, Path]) -> Path:
        """
        Refuse to clobber an existing file unless forced.

        Raises:
            OutputExistsError: If the file exists and force is not set
        """
        return validate_output_path(file_path, self.force)

    @contextmanager
    def atomic_write(self, file_path: Union[str, Path], mode: str = 'w'):
        """
        Context manager for atomic file writes.

        Writes to a temporary file in the destination directory and renames
        it into place only if the write completes.

        Args:
            file_path: Final destination path
            mode: File open mode

        Yields:
            File handle for writing
        """
        file_path = Path(file_path)
        self.ensure_directory(file_path.parent)

        temp_fd, temp_path = tempfile.mkstemp(
            dir=file_path.parent,
            prefix=f'.{file_path.name}.',
            suffix='.tmp'
        )

        try:
            encoding = None if 'b' in mode else 'utf-8'
            with os.fdopen(temp_fd, mode, encoding=encoding, newline='' if encoding else None) as f:
                yield f
            Path(temp_path).replace(file_path)

        except BaseException:
            try:
                os.unlink(temp_path)
            except OSError:
                pass
            raise

    def write_text(self, file_path: Union[str, Path], content: str) -> Path:
        """
        Write text atomically after the clobber check.

        Returns:
            The written path
        """
        file_path = self.check_writable(file_path)
        with self.atomic_write(file_path) as f:
            f.write(content)
        self.logger.debug(f"Wrote {file_path} ({len(content)} chars)")
        return file_path

    def read_text(self, file_path: Union[str, Path]) -> str:
        """
        Read a UTF-8 text file.

        Raises:
            DatasetFormatError: If the file is missing or not UTF-8
        """
        file_path = validate_input_file(file_path)
        try:
            return file_path.read_text(encoding='utf-8')
        except (OSError, UnicodeDecodeError) as e:
            raise DatasetFormatError(f"Cannot read {file_path}: {e}", path=str(file_path))

    def save_json(self, file_path: Union[str, Path], data: Dict[str, Any], indent: int = 2) -> Path:
        """
        Save data as a JSON file.

        Floats are written with their shortest round-trip representation,
        so a reload reproduces them bit for bit.
        """
        content = json.dumps(data, indent=indent, ensure_ascii=False, allow_nan=False) + '\n'
        return self.write_text(file_path, content)

    def load_json(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Load a JSON object from a file.

        Raises:
            DatasetFormatError: If the file is missing, not JSON, or not an object
        """
        content = self.read_text(file_path)
        try:
            data = json.loads(content)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"Invalid JSON: {e.msg}", path=str(file_path),
                                     field=f"line {e.lineno}")
        if not isinstance(data, dict):
            raise DatasetFormatError("Top-level JSON value must be an object", path=str(file_path))
        return data
