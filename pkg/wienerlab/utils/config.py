# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Configuration Parsing and Validation for wienerlab

One plain-text format is shared by every command:

    # comment
    kind = verify

    [domain]
    kind = spike
    grid_n = 128
    center = 0, 0

Top-level keys (before the first section) live in the ``""`` section. Every
key remembers its line so diagnostics can point at it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from wienerlab.exceptions import ConfigError
from wienerlab.utils.logging import get_logger

logger = get_logger("wienerlab.config")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class ConfigEntry:
    """Single key-value pair with its source line"""
    value: str
    line: int


@dataclass
class ConfigDocument:
    """Parsed configuration: sections of raw string entries"""
    sections: dict[str, dict[str, ConfigEntry]] = field(default_factory=dict)
    source: str = "<string>"
    text: str = ""

    @property
    def kind(self) -> str:
        return self.get_str("", "kind")

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def has_section(self, section: str) -> bool:
        return section in self.sections

    def section(self, section: str) -> dict[str, ConfigEntry]:
        return self.sections.get(section, {})

    def has(self, section: str, key: str) -> bool:
        return key in self.section(section)

    def _entry(self, section: str, key: str) -> ConfigEntry | None:
        return self.section(section).get(key)

    def _name(self, section: str, key: str) -> str:
        return f"{section}.{key}" if section else key

    def _missing(self, section: str, key: str):
        raise ConfigError("required field is missing", field=self._name(section, key))

    def get_str(self, section: str, key: str, default: str | None = None) -> str:
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                self._missing(section, key)
            return default  # type: ignore[return-value]
        return entry.value

    def get_float(self, section: str, key: str, default: float | None = None) -> float:
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                self._missing(section, key)
            return float(default)  # type: ignore[arg-type]
        try:
            return float(entry.value)
        except ValueError:
            raise ConfigError(f"expected a number, got {entry.value!r}", field=self._name(section, key),
                              line=entry.line)

    def get_optional_float(self, section: str, key: str) -> float | None:
        """Float or None when absent or ``auto``"""
        entry = self._entry(section, key)
        if entry is None or entry.value.lower() in ("auto", "none", ""):
            return None
        return self.get_float(section, key)

    def get_int(self, section: str, key: str, default: int | None = None) -> int:
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                self._missing(section, key)
            return int(default)  # type: ignore[arg-type]
        try:
            return int(entry.value)
        except ValueError:
            raise ConfigError(f"expected an integer, got {entry.value!r}", field=self._name(section, key),
                              line=entry.line)

    def get_bool(self, section: str, key: str, default: bool | None = None) -> bool:
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                self._missing(section, key)
            return bool(default)
        value = entry.value.lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise ConfigError(f"expected a boolean, got {entry.value!r}", field=self._name(section, key),
                          line=entry.line)

    def get_floats(self, section: str, key: str, default: Iterable[float] | None = None) -> tuple[float, ...]:
        """Comma-separated list of numbers (points, sweeps)"""
        entry = self._entry(section, key)
        if entry is None:
            if default is None:
                self._missing(section, key)
            return tuple(float(v) for v in default)  # type: ignore[union-attr]
        try:
            return tuple(float(v) for v in entry.value.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"expected comma-separated numbers, got {entry.value!r}",
                              field=self._name(section, key), line=entry.line)

    def items(self, section: str) -> dict[str, str]:
        return {k: e.value for k, e in self.section(section).items()}

    def snapshot(self) -> dict[str, dict[str, str]]:
        """Resolved config as plain dicts (embedded in reports and manifests)"""
        return {name or "_": self.items(name) for name in self.sections}

    def with_overrides(self, overrides: dict[str, dict[str, Any]]) -> ConfigDocument:
        """Copy with replaced values; the original document is not mutated"""
        sections = {name: dict(entries) for name, entries in self.sections.items()}
        for name, values in overrides.items():
            target = sections.setdefault(name, {})
            for key, value in values.items():
                line = target[key].line if key in target else 0
                target[key] = ConfigEntry(str(value), line)
        return ConfigDocument(sections=sections, source=self.source, text=self.text)


def parse_config(text: str, source: str = "<string>") -> ConfigDocument:
    """Parse the plain-text config format.

    Raises:
        ConfigError: on malformed lines or duplicate keys, naming the line.
    """
    doc = ConfigDocument(sections={"": {}}, source=source, text=text)
    current = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", field=source, line=lineno)
            current = line[1:-1].strip().lower()
            doc.sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", field=source, line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if not key:
            raise ConfigError("empty key", field=source, line=lineno)
        if key in doc.sections[current]:
            raise ConfigError("duplicate key", field=doc._name(current, key), line=lineno)
        doc.sections[current][key] = ConfigEntry(value, lineno)
    return doc


def load_config(path: str | Path) -> ConfigDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", field=str(path))
    return parse_config(text, source=str(path))


@dataclass
class ConfigIssue:
    """Configuration issue"""
    field: str
    message: str
    severity: str = "error"


@dataclass
class ConfigValidationResult:
    """Result of configuration validation"""
    is_valid: bool
    issues: list[ConfigIssue]

    def get_errors(self) -> list[ConfigIssue]:
        return [i for i in self.issues if i.severity == "error"]

    def get_warnings(self) -> list[ConfigIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    def raise_if_invalid(self):
        errors = self.get_errors()
        if errors:
            first = errors[0]
            raise ConfigError("; ".join(i.message for i in errors), field=first.field)

    def log_warnings(self):
        for issue in self.get_warnings():
            logger.warning(f"Config warning - {issue.field}: {issue.message}")

    def to_dict(self) -> dict:
        return {
            "valid": self.is_valid,
            "errors": [{"field": i.field, "message": i.message} for i in self.get_errors()],
            "warnings": [{"field": i.field, "message": i.message} for i in self.get_warnings()],
        }


class ConfigValidator:
    """Base validator: subclasses contribute ``_validate_*`` methods returning issues"""

    checks: tuple[str, ...] = ()

    def validate(self, target: Any) -> ConfigValidationResult:
        issues: list[ConfigIssue] = []
        for name in self.checks:
            issues.extend(getattr(self, name)(target))
        is_valid = len([i for i in issues if i.severity == "error"]) == 0
        return ConfigValidationResult(is_valid=is_valid, issues=issues)
