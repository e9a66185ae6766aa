"""Dependency manifests: discovery, parsing, and requirement emission."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import yaml

from .xmlbuild import escape_attr, escape_text

logger = logging.getLogger(__name__)

CONDA_FILENAMES = ('environment.yml', 'environment.yaml')
REQUIREMENTS_FILENAME = 'requirements.txt'

WarnFn = Callable[[str], None]


class ManifestError(Exception):
    """A manifest that cannot be used; kind is parse or duplicate."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class DependencyEntry:
    package: str
    version: Optional[str] = None
    channel: Optional[str] = None


@dataclass
class DependencySet:
    entries: List[DependencyEntry] = field(default_factory=list)
    source_format: str = 'none'


def discover_manifest(project_root: Path) -> Optional[Tuple[Path, str]]:
    """The manifest to use for a project root; conda files win."""
    root = Path(project_root)
    for name in CONDA_FILENAMES:
        candidate = root / name
        if candidate.is_file():
            return candidate, 'conda_env_yaml'
    candidate = root / REQUIREMENTS_FILENAME
    if candidate.is_file():
        return candidate, 'requirements_txt'
    return None


def _check_duplicate(seen: dict, package: str, source: str) -> None:
    key = package.lower().replace('_', '-')
    if key in seen:
        raise ManifestError('duplicate',
                            f'{source}: package {package!r} listed twice')
    seen[key] = package


_REQ_LINE = re.compile(
    r'^(?P<name>[A-Za-z0-9][A-Za-z0-9._\[\],-]*)\s*'
    r'(?P<op>===|==|~=|!=|>=|<=|>|<)?\s*(?P<version>[^;\s]+)?\s*$')

_CONDA_SPEC = re.compile(
    r'^(?:(?P<channel>[A-Za-z0-9._-]+)::)?'
    r'(?P<name>[A-Za-z0-9][A-Za-z0-9._-]*)\s*(?P<rest>.*)$')


def _parse_requirement_line(line: str, seen: dict, source: str,
                            warn: WarnFn) -> Optional[DependencyEntry]:
    line = line.split('#', 1)[0].strip()
    if not line:
        return None
    if line.startswith('-'):
        warn(f'{source}: option line {line!r} ignored')
        return None
    match = _REQ_LINE.match(line)
    if not match:
        warn(f'{source}: unparseable requirement {line!r} ignored')
        return None
    name = match.group('name')
    op = match.group('op')
    version = match.group('version')
    _check_duplicate(seen, name, source)
    if op in ('==', '==='):
        return DependencyEntry(name, version)
    if op:
        warn(f'{source}: version specifier {op}{version} for {name} is not '
             'an exact pin; version dropped')
    return DependencyEntry(name)


def parse_requirements_txt(text: str, source: str = 'requirements.txt',
                           warn: Optional[WarnFn] = None) -> DependencySet:
    """Parse a line-oriented requirements manifest."""
    warn = warn or logger.warning
    seen: dict = {}
    entries: List[DependencyEntry] = []
    for raw in text.splitlines():
        entry = _parse_requirement_line(raw, seen, source, warn)
        if entry is not None:
            entries.append(entry)
    return DependencySet(entries, 'requirements_txt')


def _parse_conda_scalar(item: str, seen: dict, source: str,
                        warn: WarnFn) -> Optional[DependencyEntry]:
    match = _CONDA_SPEC.match(item.strip())
    if not match:
        warn(f'{source}: unparseable dependency {item!r} ignored')
        return None
    name = match.group('name')
    channel = match.group('channel')
    rest = match.group('rest').strip()
    _check_duplicate(seen, name, source)
    version = None
    if rest:
        if rest.startswith('==') or rest.startswith('='):
            spec = rest.lstrip('=')
            parts = spec.split('=')
            version = parts[0].strip() or None
            if len(parts) > 1:
                warn(f'{source}: build string for {name} dropped')
            if version and not re.match(r'^[A-Za-z0-9._+!-]+$', version):
                warn(f'{source}: version specifier {rest!r} for {name} is '
                     'not an exact pin; version dropped')
                version = None
        else:
            warn(f'{source}: version specifier {rest!r} for {name} is not '
                 'an exact pin; version dropped')
    return DependencyEntry(name, version, channel)


def parse_conda_env(text: str, source: str = 'environment.yml',
                    warn: Optional[WarnFn] = None) -> DependencySet:
    """Parse a conda environment file's dependencies list."""
    warn = warn or logger.warning
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ManifestError('parse', f'{source}: malformed YAML: {err}')
    if doc is None:
        doc = {}
    if not isinstance(doc, dict) or 'dependencies' not in doc:
        raise ManifestError('parse', f'{source}: no dependencies list')
    raw = doc['dependencies'] or []
    if not isinstance(raw, list):
        raise ManifestError('parse', f'{source}: dependencies is not a list')
    seen: dict = {}
    entries: List[DependencyEntry] = []
    for item in raw:
        if isinstance(item, str):
            entry = _parse_conda_scalar(item, seen, source, warn)
            if entry is not None:
                entries.append(entry)
        elif isinstance(item, dict) and 'pip' in item:
            for line in item['pip'] or []:
                entry = _parse_requirement_line(str(line), seen, source, warn)
                if entry is not None:
                    entries.append(entry)
        else:
            warn(f'{source}: dependency entry {item!r} ignored')
    return DependencySet(entries, 'conda_env_yaml')


def load_manifest(project_root: Path,
                  warn: Optional[WarnFn] = None) -> DependencySet:
    """Discover and parse the manifest for a project root."""
    found = discover_manifest(project_root)
    if found is None:
        return DependencySet([], 'none')
    path, fmt = found
    text = path.read_text(encoding='utf-8')
    if fmt == 'conda_env_yaml':
        return parse_conda_env(text, source=str(path), warn=warn)
    return parse_requirements_txt(text, source=str(path), warn=warn)


def emit_requirements(deps: DependencySet) -> List[str]:
    """One requirement element per entry; channels survive as comments."""
    elements: List[str] = []
    for entry in deps.entries:
        version = f' version="{escape_attr(entry.version)}"' \
            if entry.version else ''
        element = (f'<requirement type="package"{version}>'
                   f'{escape_text(entry.package)}</requirement>')
        if entry.channel:
            element = f'<!-- channel: {entry.channel} -->\n{element}'
        elements.append(element)
    return elements
