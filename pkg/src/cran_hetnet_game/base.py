"""
Abstract base parser for key-value configuration files.

Scenario files and sweep spec files share one flat text format: one
`key = value` pair per line, `#` starts a comment. This module provides the
KeyValueParser class that reads that format and leaves the typed
interpretation to subclasses.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

from .constants import ENCODING
from .exceptions import (
    GameError,
    ScenarioError,
    ScenarioFileNotFoundError,
    ScenarioParseError,
)

logger = logging.getLogger(__name__)


class KeyValueParser(ABC):
    """
    Abstract base class for `key = value` file parsers.

    Implements common parsing logic:
    - Line reading with `#` comments
    - Rejection of malformed lines, empty values and duplicate keys
    - Rejection of keys refused by is_allowed_key
    - Error wrapping (package errors pass through, anything else becomes
      ScenarioParseError)

    Subclasses must implement:
    - is_allowed_key: Predicate for accepted keys
    - _build: Turn the raw string pairs into a typed object
    """

    ENCODING = ENCODING

    # Directory of the file being parsed, for resolving relative paths
    base_dir: Optional[Path] = None

    @abstractmethod
    def is_allowed_key(self, key: str) -> bool:
        """True if `key` may appear in this file type."""
        ...

    @abstractmethod
    def _build(self, pairs: dict[str, str]) -> Any:
        """
        Build the typed object from raw pairs.

        Args:
            pairs: Key -> raw value string, keys validated by is_allowed_key

        Returns:
            Parsed object
        """
        ...

    def parse(self, content: bytes) -> Any:
        """
        Parse file content from bytes.

        Args:
            content: Raw file bytes

        Returns:
            Object built by the subclass

        Raises:
            ScenarioParseError: If the content is malformed
            ScenarioError: If a key is unknown or a value is invalid
        """
        logger.debug(f"Parsing with {self.__class__.__name__}")

        try:
            pairs = self._read_pairs(content)
            unknown = [key for key in pairs if not self.is_allowed_key(key)]
            if unknown:
                raise ScenarioError(f"Unknown keys: {', '.join(sorted(unknown))}")
            return self._build(pairs)

        except UnicodeDecodeError as e:
            raise ScenarioParseError(f"Failed to decode file with {self.ENCODING} encoding: {e}")
        except ValidationError as e:
            raise ScenarioError(f"Invalid values: {e}")
        except Exception as e:
            if isinstance(e, GameError):
                raise
            raise ScenarioParseError(f"Failed to parse {self.__class__.__name__} input: {e}")

    def parse_file(self, file_path: Union[str, Path]) -> Any:
        """
        Parse a file from a filesystem path.

        Args:
            file_path: Path to the file

        Returns:
            Object built by the subclass

        Raises:
            ScenarioFileNotFoundError: If the file doesn't exist
            ScenarioParseError: If parsing fails
        """
        path = Path(file_path)
        if not path.is_file():
            raise ScenarioFileNotFoundError(f"File not found: {file_path}")

        logger.info(f"Reading file: {file_path}")
        self.base_dir = path.parent
        return self.parse(path.read_bytes())

    def _read_pairs(self, content: bytes) -> dict[str, str]:
        """
        Read `key = value` lines.

        Returns:
            Dict of stripped keys and values, in file order
        """
        pairs: dict[str, str] = {}
        text = content.decode(self.ENCODING)

        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue

            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or "=" in value:
                raise ScenarioParseError(f"Line {line_no}: expected 'key = value', got {raw!r}")
            if not value:
                raise ScenarioParseError(f"Line {line_no}: missing value for {key!r}")
            if key in pairs:
                raise ScenarioParseError(f"Line {line_no}: duplicate key {key!r}")
            pairs[key] = value

        logger.debug(f"Read {len(pairs)} key-value pairs")
        return pairs
