"""YAML configuration: registry endpoints and heuristic rule overrides.

Lookup order for the file itself: an explicit path, then $EXECDESC_CONFIG,
then no file at all.  $EXECDESC_LIBRARIES (comma-separated) overrides the
file's endpoint list; rules given in the file replace the built-in table
wholesale rather than merging with it, so what you wrote is what runs.

Example::

    libraries:
      - http://localhost:8642
    rules:
      - name: makefile
        trigger: Makefile
        command: make all
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

import yaml

from execdesc.errors import ExecdescError
from execdesc.heuristics import DEFAULT_RULES, HeuristicRule, RuleTable

ENV_CONFIG = "EXECDESC_CONFIG"
ENV_LIBRARIES = "EXECDESC_LIBRARIES"

_KNOWN_KEYS = {"libraries", "rules"}
_RULE_KEYS = ("name", "trigger", "command")


class ConfigError(ExecdescError):
    """The configuration file or environment cannot be used as written."""


@dataclass(frozen=True)
class Config:
    libraries: tuple[str, ...] = ()
    rules: Optional[RuleTable] = None
    path: Optional[Path] = None

    @property
    def rule_table(self) -> RuleTable:
        return self.rules if self.rules is not None else DEFAULT_RULES


def _string_list(value, what: str, origin: Path) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) and v.strip() for v in value):
        raise ConfigError(f"{origin}: {what} must be a list of non-empty strings")
    return tuple(v.strip() for v in value)


def _rule_table(value, origin: Path) -> RuleTable:
    if not isinstance(value, list):
        raise ConfigError(f"{origin}: rules must be a list of rule entries")
    rules = []
    for i, entry in enumerate(value):
        if not isinstance(entry, Mapping):
            raise ConfigError(f"{origin}: rule {i + 1} must be a mapping")
        unknown = sorted(set(entry) - set(_RULE_KEYS))
        if unknown:
            raise ConfigError(f"{origin}: rule {i + 1} has unknown keys: {', '.join(unknown)}")
        fields = {}
        for key in _RULE_KEYS:
            field = entry.get(key)
            if not isinstance(field, str) or not field.strip():
                raise ConfigError(f"{origin}: rule {i + 1} needs a non-empty {key!r}")
            fields[key] = field.strip()
        rules.append(HeuristicRule(**fields))
    try:
        return RuleTable(tuple(rules))
    except ValueError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc


def load_config(path: Optional[Path] = None, env: Mapping[str, str] = None) -> Config:
    """Effective configuration from the file (if any) and the environment."""
    env = os.environ if env is None else env

    chosen: Optional[Path] = None
    if path is not None:
        chosen = Path(path)
    elif env.get(ENV_CONFIG):
        chosen = Path(env[ENV_CONFIG])

    libraries: tuple[str, ...] = ()
    rules: Optional[RuleTable] = None
    if chosen is not None:
        try:
            text = chosen.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {chosen}: {exc}") from exc
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{chosen}: not valid YAML: {exc}") from exc
        if data is None:
            data = {}
        if not isinstance(data, Mapping):
            raise ConfigError(f"{chosen}: top level must be a mapping")
        unknown = sorted(set(data) - _KNOWN_KEYS)
        if unknown:
            raise ConfigError(f"{chosen}: unknown keys: {', '.join(unknown)}")
        if "libraries" in data:
            libraries = _string_list(data["libraries"], "libraries", chosen)
        if "rules" in data:
            rules = _rule_table(data["rules"], chosen)

    if env.get(ENV_LIBRARIES):
        libraries = tuple(
            part.strip() for part in env[ENV_LIBRARIES].split(",") if part.strip()
        )

    return Config(libraries=libraries, rules=rules, path=chosen)
