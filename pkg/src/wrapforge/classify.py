"""Three-tier parameter classification and per-kind emission behaviors."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional

from .extraction import ArgumentSpec
from .kinds import (
    ParameterKind,
    SELECT_KIND,
    TEXT_KIND,
    builtin_metavar_map,
    default_name_fallbacks,
)
from .xmlbuild import serialize_element

logger = logging.getLogger(__name__)

GUARD_STYLES = ('truevalue', 'if_block')

APPEND_HELP_NOTE = 'May be given multiple times; separate values with spaces.'

WarnFn = Callable[[str], None]


@dataclass(frozen=True)
class ClassifiedParameter:
    spec: ArgumentSpec
    kind: ParameterKind
    galaxy_name: str
    label: str
    optional: bool
    classification_tier: str

    def with_kind(self, kind: ParameterKind) -> 'ClassifiedParameter':
        return replace(self, kind=kind)


@dataclass(frozen=True)
class CommandSegment:
    text: str
    guard: Optional[str]
    dest: str


def _label_for(dest: str) -> str:
    return ' '.join(word.capitalize() for word in dest.split('_'))


def _long_flag(spec: ArgumentSpec) -> Optional[str]:
    """The longest long-form flag; falls back to the longest flag."""
    longs = [f for f in spec.flags if f.startswith('--')]
    pool = longs or spec.flags
    return max(pool, key=len) if pool else None


def _first_flag(spec: ArgumentSpec) -> str:
    return spec.flags[0] if spec.flags else ''


def _is_multi_valued(spec: ArgumentSpec) -> bool:
    if spec.nargs in ('zero_or_more', 'one_or_more'):
        return True
    return isinstance(spec.nargs, int) and spec.nargs >= 2


def classify(spec: ArgumentSpec,
             metavar_map: Optional[Dict[str, ParameterKind]] = None,
             name_fallbacks: Optional[Dict[str, ParameterKind]] = None,
             warn: Optional[WarnFn] = None) -> ClassifiedParameter:
    """Bind one ArgumentSpec to a ParameterKind via the tier precedence."""
    warn = warn or logger.warning
    table = metavar_map if metavar_map is not None else builtin_metavar_map()
    fallbacks = (name_fallbacks if name_fallbacks is not None
                 else default_name_fallbacks())

    kind: Optional[ParameterKind] = None
    tier = 'action'
    if spec.metavar is not None:
        if spec.metavar in table:
            kind = table[spec.metavar]
            tier = 'metavar'
        else:
            warn(f'unknown metavar {spec.metavar!r} for {spec.dest}; '
                 'falling back to name and action tiers')
    if kind is None and spec.dest in fallbacks:
        kind = fallbacks[spec.dest]
        tier = 'name'
    if kind is None:
        tier = 'action'
        if spec.action in ('store_true', 'store_false'):
            kind = ParameterKind('boolean', 'boolean')
        elif spec.action == 'count':
            kind = ParameterKind('int', 'integer')
        elif spec.choices:
            kind = SELECT_KIND
        elif spec.value_type_hint == 'integer':
            kind = ParameterKind('int', 'integer')
        elif spec.value_type_hint == 'float':
            kind = ParameterKind('float', 'float')
        else:
            kind = TEXT_KIND

    if spec.action == 'append' and not kind.is_output:
        if kind.galaxy_type != 'text':
            kind = TEXT_KIND
        warn(f'{spec.dest}: append action mapped to a space-separated '
             'text value')
    if spec.action == 'count':
        warn(f'{spec.dest}: count action mapped to a single flag; '
             'repetition is not expanded')
    if _is_multi_valued(spec) and not kind.is_output:
        if kind.galaxy_type != 'text':
            warn(f'{spec.dest}: multi-valued argument mapped to a '
                 'space-separated text value')
            kind = TEXT_KIND
    if spec.choices and kind.galaxy_type == 'text':
        kind = SELECT_KIND

    return ClassifiedParameter(
        spec=spec,
        kind=kind,
        galaxy_name=spec.dest,
        label=_label_for(spec.dest),
        optional=not spec.required and not kind.is_output,
        classification_tier=tier,
    )


# --- staging template instantiation ----------------------------------------

def instantiate(template: str, cp: ClassifiedParameter,
                staging_name: Optional[str] = None,
                staging_braced: Optional[str] = None) -> str:
    """Fill a staging template; literal staging names unless overridden."""
    staging = cp.kind.staging
    name = staging_name if staging_name is not None else \
        (staging.filename if staging else '')
    braced = staging_braced if staging_braced is not None else name
    flag = _first_flag(cp.spec) if cp.kind.is_output else \
        (_long_flag(cp.spec) or '')
    return template.format(s=name, sb=braced, flag=flag,
                           var=f'${cp.galaxy_name}').strip()


def pre_command(cp: ClassifiedParameter) -> Optional[str]:
    staging = cp.kind.staging
    if staging is None or staging.pre is None:
        return None
    return instantiate(staging.pre, cp)


def post_command(cp: ClassifiedParameter) -> Optional[str]:
    staging = cp.kind.staging
    if staging is None or staging.post is None:
        return None
    return instantiate(staging.post, cp)


def command_segment(cp: ClassifiedParameter,
                    guard_style: str = 'truevalue') -> CommandSegment:
    """The command-line snippet for one parameter."""
    if guard_style not in GUARD_STYLES:
        raise ValueError(f'unknown guard style: {guard_style!r}')
    spec = cp.spec
    name = cp.galaxy_name
    staging = cp.kind.staging
    if staging is not None and staging.segment is not None:
        return CommandSegment(instantiate(staging.segment, cp), None, name)
    if cp.kind.galaxy_type == 'boolean':
        flag = _long_flag(spec) or _first_flag(spec)
        if guard_style == 'if_block':
            return CommandSegment(flag, name, name)
        return CommandSegment(f'${name}', None, name)
    guard = name if cp.optional else None
    if spec.action == 'count':
        flag = _long_flag(spec) or _first_flag(spec)
        text = f'{flag} ## repeated ${name} times'
        return CommandSegment(text, guard, name)
    if spec.positional_name is not None:
        return CommandSegment(f"'${name}'", guard, name)
    flag = _long_flag(spec) or _first_flag(spec)
    return CommandSegment(f"{flag} '${name}'", guard, name)


# --- XML emission -----------------------------------------------------------

def _set_value_attr(el: ET.Element, cp: ClassifiedParameter) -> None:
    default = cp.spec.default_value
    gtype = cp.kind.galaxy_type
    if gtype == 'integer' and cp.spec.action == 'count' and default is None:
        default = 0
    if default is None or gtype not in ('integer', 'float', 'text'):
        return
    el.set('value', str(default))


def emit_param_xml(cp: ClassifiedParameter) -> str:
    """One <param> element in canonical text form."""
    if cp.kind.is_output:
        raise ValueError(f'{cp.galaxy_name} is an output parameter')
    el = ET.Element('param')
    el.set('name', cp.galaxy_name)
    el.set('type', cp.kind.galaxy_type)
    if cp.kind.galaxy_type == 'boolean':
        flag = _long_flag(cp.spec) or _first_flag(cp.spec)
        el.set('truevalue', flag)
        el.set('falsevalue', '')
        el.set('checked', 'true' if cp.spec.default_value else 'false')
    else:
        if cp.kind.format_attr:
            el.set('format', cp.kind.format_attr)
        _set_value_attr(el, cp)
        if cp.optional:
            el.set('optional', 'true')
    el.set('label', cp.label)
    long_flag = _long_flag(cp.spec)
    if long_flag:
        el.set('argument', long_flag)
    help_text = cp.spec.help_text
    if cp.spec.action == 'append':
        help_text = f'{help_text} {APPEND_HELP_NOTE}'.strip()
    if help_text:
        el.set('help', help_text)
    if cp.kind.galaxy_type == 'select':
        for choice in cp.spec.choices or []:
            option = ET.SubElement(el, 'option')
            option.set('value', str(choice))
            if cp.spec.default_value == choice:
                option.set('selected', 'true')
            option.text = str(choice)
    return serialize_element(el)


def emit_output_xml(cp: ClassifiedParameter) -> str:
    """One <data> element in canonical text form."""
    if not cp.kind.is_output:
        raise ValueError(f'{cp.galaxy_name} is not an output parameter')
    el = ET.Element('data')
    el.set('name', cp.galaxy_name)
    if cp.kind.format_attr:
        el.set('format', cp.kind.format_attr)
    el.set('label', f'${{tool.name}} on ${{on_string}}: {cp.label}')
    return serialize_element(el)
