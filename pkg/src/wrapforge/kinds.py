"""Parameter kinds: the metavar table, name fallbacks, and staging recipes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

logger = logging.getLogger(__name__)

GALAXY_TYPES = ('data', 'integer', 'float', 'text', 'boolean', 'select')

KIND_FLAGS = ('output', 'composite')


@dataclass(frozen=True)
class Staging:
    """Shell templates for parameters that stage files in the job directory.

    Templates use {s} for the staging name, {sb} for its braced variable
    form, {var} for the parameter's own $variable, and {flag} for the flag.
    """

    filename: str
    pre: Optional[str] = None
    segment: Optional[str] = None
    post: Optional[str] = None


@dataclass(frozen=True)
class ParameterKind:
    """One row of the classification table."""

    kind_id: str
    galaxy_type: str
    format_attr: Optional[str] = None
    is_output: bool = False
    is_composite: bool = False
    staging: Optional[Staging] = None
    in_place: bool = False

    def __post_init__(self) -> None:
        if self.galaxy_type not in GALAXY_TYPES:
            raise ValueError(f'unknown galaxy type: {self.galaxy_type!r}')
        if self.galaxy_type != 'data' and (self.format_attr or self.is_output
                                           or self.is_composite):
            raise ValueError(
                f'{self.kind_id}: format/output/composite require a data type')
        if self.is_output and (self.staging is None or self.staging.post is None):
            raise ValueError(f'{self.kind_id}: output kinds need a post command')


# Simple scalar kinds shared by the fallback tiers.
INT_KIND = ParameterKind('int', 'integer')
FLOAT_KIND = ParameterKind('float', 'float')
TEXT_KIND = ParameterKind('text', 'text')
BOOLEAN_KIND = ParameterKind('boolean', 'boolean')
SELECT_KIND = ParameterKind('select', 'select')

# Composite database outputs collect <staging>* into the history dataset and
# need the auxiliary .d directory created up front.
_COMPOSITE_OUT_PRE = "mkdir -p '{sb}.d'"
_COMPOSITE_OUT_SEGMENT = "{flag} '{s}'"
_COMPOSITE_OUT_POST = "cp -r '{sb}'* '{var}'"


def _data(kind_id: str, fmt: str, composite: bool = False) -> ParameterKind:
    return ParameterKind(kind_id, 'data', fmt, is_composite=composite)


_BUILTIN_METAVAR_MAP: Dict[str, ParameterKind] = {
    'CONTIGS_DB': _data('contigs_db', 'anvio_contigs_db', composite=True),
    'PROFILE_DB': _data('profile_db', 'anvio_profile_db', composite=True),
    'PROFILE_DB_OUT': ParameterKind(
        'profile_db_out', 'data', 'anvio_profile_db',
        is_output=True, is_composite=True,
        staging=Staging('anvio_profile.db', pre=_COMPOSITE_OUT_PRE,
                        segment=_COMPOSITE_OUT_SEGMENT,
                        post=_COMPOSITE_OUT_POST)),
    'PAN_DB': _data('pan_db', 'anvio_pan_db', composite=True),
    'GENOMES_DB': _data('genomes_db', 'anvio_genomes_db', composite=True),
    'COLLECTION': _data('collection', 'anvio_collection'),
    'BIN': _data('bin', 'anvio_bin'),
    'FASTA': _data('fasta', 'fasta'),
    'BAM': _data('bam', 'bam'),
    'GENBANK': _data('genbank', 'genbank'),
    'TREE': _data('tree', 'newick'),
    'TAXONOMY': _data('taxonomy', 'tabular'),
    'TABULAR': _data('tabular', 'tabular'),
    'GFF': _data('gff', 'gff'),
    'VCF': _data('vcf', 'vcf'),
    'FILE_PATH': _data('file_path', 'data'),
    'DIR_PATH': _data('dir_path', 'directory'),
    'DIR_PATH_OUT': ParameterKind(
        'dir_path_out', 'data', 'directory', is_output=True,
        staging=Staging('output', segment="{flag} '{s}'",
                        post="cp -r {s}/* '{var}'")),
    'INT': INT_KIND,
    'FLOAT': FLOAT_KIND,
    'STRING': TEXT_KIND,
}

_DEFAULT_NAME_FALLBACKS: Dict[str, ParameterKind] = {
    'num_threads': INT_KIND,
    'output_dir': _BUILTIN_METAVAR_MAP['DIR_PATH_OUT'],
    'input_file': _BUILTIN_METAVAR_MAP['FILE_PATH'],
    'verbose': BOOLEAN_KIND,
    'debug': BOOLEAN_KIND,
}


def builtin_metavar_map() -> Dict[str, ParameterKind]:
    """A fresh copy of the built-in metavar table."""
    return dict(_BUILTIN_METAVAR_MAP)


def default_name_fallbacks() -> Dict[str, ParameterKind]:
    """A fresh copy of the default name-fallback table."""
    return dict(_DEFAULT_NAME_FALLBACKS)


def parse_kind_line(line: str) -> Tuple[str, ParameterKind]:
    """Parse one `TOKEN=galaxy_type[:format][:flags]` extension entry."""
    if '=' not in line:
        raise ValueError(f'missing "=" in kind entry: {line!r}')
    token, _, rhs = line.partition('=')
    token = token.strip()
    if not token:
        raise ValueError(f'empty token in kind entry: {line!r}')
    parts = [p.strip() for p in rhs.strip().split(':')]
    if len(parts) > 3:
        raise ValueError(f'too many fields in kind entry: {line!r}')
    galaxy_type = parts[0]
    if galaxy_type not in GALAXY_TYPES:
        raise ValueError(f'unknown galaxy type {galaxy_type!r} in: {line!r}')
    fmt = parts[1] if len(parts) > 1 and parts[1] else None
    flags = set()
    if len(parts) > 2 and parts[2]:
        flags = {f.strip() for f in parts[2].split(',') if f.strip()}
        unknown = flags - set(KIND_FLAGS)
        if unknown:
            raise ValueError(f'unknown kind flags {sorted(unknown)} in: {line!r}')
    kind_id = token.lower()
    is_output = 'output' in flags
    is_composite = 'composite' in flags
    staging = None
    if is_output:
        fname = f'{kind_id}.out'
        if is_composite:
            staging = Staging(fname, pre=_COMPOSITE_OUT_PRE,
                              segment=_COMPOSITE_OUT_SEGMENT,
                              post=_COMPOSITE_OUT_POST)
        else:
            staging = Staging(fname, segment="{flag} '{s}'",
                              post="cp -r '{s}' '{var}'")
    return token, ParameterKind(kind_id, galaxy_type, fmt,
                                is_output=is_output,
                                is_composite=is_composite, staging=staging)


def load_kind_file(path: str,
                   warn: Optional[Callable[[str], None]] = None) -> Dict[str, ParameterKind]:
    """Load a kind-entry file: one entry per line, `#` comments ignored."""
    warn = warn or logger.warning
    entries: Dict[str, ParameterKind] = {}
    with open(path, encoding='utf-8') as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            try:
                token, kind = parse_kind_line(line)
            except ValueError as err:
                raise ValueError(f'{path}:{lineno}: {err}') from err
            if token in entries:
                warn(f'{path}:{lineno}: duplicate entry for {token}, last wins')
            entries[token] = kind
    return entries


def build_metavar_map(extension_path: Optional[str] = None,
                      warn: Optional[Callable[[str], None]] = None) -> Dict[str, ParameterKind]:
    """Built-in table merged with an optional extension file."""
    warn = warn or logger.warning
    table = builtin_metavar_map()
    if extension_path:
        for token, kind in load_kind_file(extension_path, warn=warn).items():
            if token in table:
                warn(f'extension overrides built-in metavar {token}')
            table[token] = kind
    return table


def build_name_fallbacks(path: Optional[str] = None,
                         warn: Optional[Callable[[str], None]] = None) -> Dict[str, ParameterKind]:
    """Default fallback table merged with an optional override file."""
    table = default_name_fallbacks()
    if path:
        # Fallback files are keyed on dest names rather than metavar tokens.
        table.update(load_kind_file(path, warn=warn))
    return table


def _in_place_staging_name(base: ParameterKind) -> str:
    fmt = base.format_attr or ''
    if fmt.endswith('_db'):
        return fmt[:-3].rstrip('_') + '.db'
    return f'{base.kind_id}.in'


def make_in_place_kind(base: ParameterKind) -> ParameterKind:
    """Variant of a composite input kind whose dataset is modified in place.

    The input dataset is copied into the job directory first so the original
    history dataset is never touched.
    """
    if base.galaxy_type != 'data':
        raise ValueError(f'{base.kind_id}: in-place variants need a data kind')
    staging = Staging(_in_place_staging_name(base),
                      pre="cp -R '{var}' '{s}'",
                      segment="{flag} '{s}'")
    return replace(base, kind_id=base.kind_id + '_inplace',
                   is_composite=True, staging=staging, in_place=True)
