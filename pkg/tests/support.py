"""Shared helpers for building interfaces and parameters in tests."""

import random

from wrapforge.classify import classify
from wrapforge.deps import DependencySet
from wrapforge.extraction import ArgumentSpec, ToolInterface


def make_interface(tool_name, arguments, description='A test tool.',
                   epilog=None, provides=()):
    for order, spec in enumerate(arguments):
        spec.source_order = order
    return ToolInterface(
        tool_name=tool_name,
        description=description,
        epilog=epilog,
        arguments=list(arguments),
        provides_tags=list(provides),
        is_interactive='interactive' in provides,
        source_path=f'{tool_name}.py',
    )


def classify_all(interface, **kwargs):
    return [classify(spec, **kwargs) for spec in interface.arguments
            if spec.action not in ('help', 'version')]


def no_deps():
    return DependencySet([], 'none')


def normalized_lines(text):
    return [' '.join(line.split()) for line in text.splitlines()
            if line.strip()]


# --- randomized script generation -------------------------------------------

ARG_WORDS = [
    'anchor', 'basket', 'cinder', 'dune', 'ember', 'fjord', 'garnet',
    'harbor', 'ivory', 'jetty', 'kelp', 'lagoon', 'meadow', 'nectar',
    'onyx', 'pier', 'quarry', 'ridge', 'slate', 'tundra', 'umber',
    'vault', 'willow', 'xenon', 'yarrow', 'zephyr', 'basalt', 'cobble',
    'drift', 'eddy', 'flint', 'grove', 'heath', 'inlet', 'jade',
    'knoll', 'loam', 'marsh', 'nook', 'orchard', 'prairie', 'quartz',
    'reef', 'shale', 'thicket', 'upland', 'vale', 'wharf', 'yucca',
    'zinc', 'alder', 'birch', 'cedar', 'damson', 'elm', 'fir',
]

CHOICE_WORDS = ['fast', 'slow', 'auto', 'strict', 'loose', 'deep', 'wide']

INPUT_METAVARS = [
    'CONTIGS_DB', 'PROFILE_DB', 'PAN_DB', 'GENOMES_DB', 'COLLECTION',
    'BIN', 'FASTA', 'BAM', 'GENBANK', 'TREE', 'TAXONOMY', 'TABULAR',
    'GFF', 'VCF', 'FILE_PATH', 'DIR_PATH', 'INT', 'FLOAT', 'STRING',
]

OUTPUT_METAVARS = ['PROFILE_DB_OUT', 'DIR_PATH_OUT']

UNKNOWN_METAVARS = ['WIDGET', 'BLOB', 'MATRIX', 'SIGNAL']


def _random_declaration(rng, name, used_shorts):
    """One add_argument call; returns (line, is_positional)."""
    shape = rng.choice(['metavar_flag', 'metavar_flag', 'metavar_flag',
                        'positional', 'store_true', 'choices', 'typed',
                        'output', 'count', 'unknown_metavar'])
    flag = '--' + name.replace('_', '-')
    short = '-' + name[0]
    parts = []
    if shape == 'positional':
        parts.append(repr(name))
        if rng.random() < 0.3:
            parts.append("nargs='?'")
        parts.append(f"metavar={rng.choice(INPUT_METAVARS)!r}")
    else:
        if short not in used_shorts and rng.random() < 0.4:
            used_shorts.add(short)
            parts.append(repr(short))
        parts.append(repr(flag))
        if shape == 'metavar_flag':
            parts.append(f'metavar={rng.choice(INPUT_METAVARS)!r}')
        elif shape == 'unknown_metavar':
            parts.append(f'metavar={rng.choice(UNKNOWN_METAVARS)!r}')
        elif shape == 'store_true':
            parts.append("action='store_true'")
        elif shape == 'count':
            parts.append("action='count'")
        elif shape == 'choices':
            picks = rng.sample(CHOICE_WORDS, rng.randint(2, 4))
            parts.append(f'choices={picks!r}')
            if rng.random() < 0.5:
                parts.append(f'default={rng.choice(picks)!r}')
        elif shape == 'typed':
            if rng.random() < 0.5:
                parts.append('type=int')
                parts.append(f'default={rng.randint(0, 99)}')
            else:
                parts.append('type=float')
                parts.append(f'default={round(rng.uniform(0, 9), 2)}')
        elif shape == 'output':
            parts.append(f'metavar={rng.choice(OUTPUT_METAVARS)!r}')
        if shape not in ('store_true', 'count') and rng.random() < 0.4:
            parts.append('required=True')
    if rng.random() < 0.6:
        parts.append(f"help='Controls the {name.replace('_', ' ')}.'")
    return f"parser.add_argument({', '.join(parts)})", shape == 'positional'


def random_script(rng):
    """A syntactically valid argparse script with a random interface."""
    count = rng.randint(1, 8)
    names = rng.sample(ARG_WORDS, count)
    lines = ['import argparse', '',
             'parser = argparse.ArgumentParser(',
             "    description='Randomized tool surface for checks.')"]
    group_used = rng.random() < 0.25
    if group_used:
        lines.append("extras = parser.add_argument_group('extras')")
    used_shorts = {'-h'}
    for name in names:
        line, _ = _random_declaration(rng, name, used_shorts)
        if group_used and rng.random() < 0.3:
            line = line.replace('parser.add_argument', 'extras.add_argument',
                                1)
        lines.append(line)
    lines.append('args = parser.parse_args()')
    lines.append('')
    return '\n'.join(lines)
