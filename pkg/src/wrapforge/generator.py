"""Assembly of command plans and complete wrapper documents."""

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .classify import (
    ClassifiedParameter,
    CommandSegment,
    command_segment,
    emit_output_xml,
    emit_param_xml,
    instantiate,
)
from .deps import DependencySet
from .extraction import ToolInterface
from .xmlbuild import canonical_serialize, parse_xml

logger = logging.getLogger(__name__)

WarnFn = Callable[[str], None]

# Tool-name prefixes of known suites: prefix -> (url short name, display name).
SUITE_ALIASES = {'anvi': ('anvio', "Anvi'o")}


class RenderFailure(Exception):
    """The wrapper cannot be rendered faithfully."""


@dataclass
class GeneratorConfig:
    version_string: str = '1.0.0'
    interactive_port: int = 8080
    interactive_url_template: str = 'interactives/{name}'
    metavar_map_extension_path: Optional[str] = None
    name_fallback_path: Optional[str] = None
    guard_style: str = 'truevalue'
    output_dir: str = 'wrappers'
    citation_dois: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 1 <= int(self.interactive_port) <= 65535:
            raise ValueError(
                f'interactive port {self.interactive_port} out of range')
        if self.guard_style not in ('truevalue', 'if_block'):
            raise ValueError(f'unknown guard style {self.guard_style!r}')


@dataclass
class CommandPlan:
    set_lines: List[str]
    pre_commands: List[str]
    executable: str
    segments: List[CommandSegment]
    post_commands: List[str]


@dataclass
class WrapperDocument:
    tool_id: str
    tool_name: str
    version: str
    requirements: List[Tuple[str, Optional[str]]]
    inputs: List[str]
    outputs: List[str]
    command_text: str
    entry_points: Optional[Dict[str, object]]
    help_text: str
    citations: List[str]
    xml_text: str


def _unique_staging_names(params: List[ClassifiedParameter]) -> Dict[str, str]:
    """Per-parameter staging filenames, uniquified within one plan."""
    taken: Dict[str, int] = {}
    names: Dict[str, str] = {}
    for cp in params:
        if cp.kind.staging is None:
            continue
        base = cp.kind.staging.filename
        count = taken.get(base, 0) + 1
        taken[base] = count
        names[cp.galaxy_name] = base if count == 1 else f'{base}.{count}'
    return names


def build_command_plan(interface: ToolInterface,
                       params: List[ClassifiedParameter],
                       guard_style: str = 'truevalue') -> CommandPlan:
    """Order pre-commands, segments, and post-commands for one tool."""
    active = [cp for cp in params
              if cp.spec.action not in ('help', 'version')]
    staging_names = _unique_staging_names(active)
    param_names = {cp.galaxy_name for cp in active}

    set_lines: List[str] = []
    pre_commands: List[str] = []
    segments: List[CommandSegment] = []
    post_commands: List[str] = []

    for cp in active:
        staging = cp.kind.staging
        if staging is None:
            segments.append(command_segment(cp, guard_style))
            continue
        fname = staging_names[cp.galaxy_name]
        if cp.kind.is_output and cp.kind.is_composite:
            # Composite outputs go through a #set variable, so the staging
            # path is named once and reused by every staging command.
            var = f'{cp.galaxy_name}_path'
            while var in param_names:
                var += '_staged'
            set_lines.append(f'#set ${var} = "{fname}"')
            plain, braced = f'${var}', f'${{{var}}}'
        else:
            plain, braced = fname, fname
        if staging.pre:
            pre_commands.append(instantiate(staging.pre, cp, plain, braced))
        if staging.segment:
            segments.append(CommandSegment(
                instantiate(staging.segment, cp, plain, braced),
                None, cp.galaxy_name))
        else:
            segments.append(command_segment(cp, guard_style))
        if staging.post:
            post_commands.append(instantiate(staging.post, cp, plain, braced))

    return CommandPlan(set_lines, pre_commands, interface.tool_name,
                       segments, post_commands)


def render_command_body(plan: CommandPlan) -> str:
    """The command block body, one segment per line, &&-joined staging."""
    lines: List[str] = list(plan.set_lines)
    for pre in plan.pre_commands:
        lines.append(f'{pre} &&')

    exec_line = plan.executable
    rest = list(plan.segments)
    if rest and rest[0].guard is None:
        exec_line = f'{exec_line} {rest[0].text}'
        rest = rest[1:]
    lines.append(exec_line)
    last_is_guarded = False
    for seg in rest:
        if seg.guard is None:
            lines.append(seg.text)
            last_is_guarded = False
        else:
            lines.extend([f'#if ${seg.guard}:', f'  {seg.text}', '#end if'])
            last_is_guarded = True

    if plan.post_commands:
        if last_is_guarded:
            # The conjunction cannot ride on a conditional line.
            lines.append('&&')
        else:
            lines[-1] = f'{lines[-1]} &&'
        for index, post in enumerate(plan.post_commands):
            tail = ' &&' if index < len(plan.post_commands) - 1 else ''
            lines.append(f'{post}{tail}')
    return '\n'.join(lines)


def render_help(interface: ToolInterface) -> str:
    """Help body: description paragraph, blank line, epilog paragraph."""
    parts = [p.strip() for p in (interface.description, interface.epilog)
             if p and p.strip()]
    return '\n\n'.join(parts)


def _display_name(tool_name: str) -> Tuple[str, str]:
    """(display name, url short name) for a tool."""
    parts = [p for p in re.split(r'[-_]', tool_name) if p]
    if parts and parts[0] in SUITE_ALIASES:
        short, display = SUITE_ALIASES[parts[0]]
        words = [display] + [p.capitalize() for p in parts[1:]]
        return ' '.join(words), short
    return ' '.join(p.capitalize() for p in parts) or tool_name, tool_name


def render_entry_points(interface: ToolInterface,
                        config: Optional[GeneratorConfig] = None
                        ) -> Optional[ET.Element]:
    """The entry_points block for interactive tools, else None."""
    if not interface.is_interactive:
        return None
    config = config or GeneratorConfig()
    display, short = _display_name(interface.tool_name)
    url = config.interactive_url_template.format(name=short)
    block = ET.Element('entry_points')
    point = ET.SubElement(block, 'entry_point')
    point.set('name', display)
    point.set('port', str(config.interactive_port))
    url_el = ET.SubElement(point, 'url')
    url_el.text = url
    return block


def _sanitize_tool_id(tool_name: str) -> str:
    tool_id = re.sub(r'[^A-Za-z0-9_]', '_', tool_name)
    if not tool_id or tool_id[0].isdigit():
        tool_id = '_' + tool_id
    return tool_id


def _reject_single_quotes(params: List[ClassifiedParameter]) -> None:
    for cp in params:
        literals = []
        if isinstance(cp.spec.default_value, str):
            literals.append(cp.spec.default_value)
        literals.extend(str(c) for c in cp.spec.choices or [])
        literals.extend(cp.spec.flags)
        for text in literals:
            if "'" in text:
                raise RenderFailure(
                    f'{cp.galaxy_name}: single quote in {text!r} cannot be '
                    'quoted safely')


def render_wrapper(interface: ToolInterface,
                   params: List[ClassifiedParameter],
                   deps: DependencySet,
                   config: Optional[GeneratorConfig] = None,
                   warn: Optional[WarnFn] = None) -> WrapperDocument:
    """Assemble the complete wrapper document for one tool."""
    config = config or GeneratorConfig()
    warn = warn or logger.warning
    active = [cp for cp in params
              if cp.spec.action not in ('help', 'version')]

    seen: Dict[str, str] = {}
    for cp in active:
        if cp.galaxy_name in seen:
            raise RenderFailure(
                f'{interface.tool_name}: parameters {seen[cp.galaxy_name]!r} '
                f'and {cp.spec.dest!r} collide on name {cp.galaxy_name!r}')
        seen[cp.galaxy_name] = cp.spec.dest
    _reject_single_quotes(active)

    plan = build_command_plan(interface, active, config.guard_style)
    body = render_command_body(plan)
    if ']]>' in body:
        raise RenderFailure(
            f'{interface.tool_name}: command text cannot contain "]]>"')

    inputs = [cp for cp in active if not cp.kind.is_output]
    outputs = [cp for cp in active if cp.kind.is_output]

    root = ET.Element('tool')
    root.set('id', _sanitize_tool_id(interface.tool_name))
    root.set('name', interface.tool_name)
    root.set('version', config.version_string)

    if interface.description and interface.description.strip():
        desc = ET.SubElement(root, 'description')
        desc.text = interface.description.strip()

    requirements = ET.SubElement(root, 'requirements')
    for entry in deps.entries:
        if entry.channel:
            requirements.append(ET.Comment(f' channel: {entry.channel} '))
        req = ET.SubElement(requirements, 'requirement')
        req.set('type', 'package')
        if entry.version:
            req.set('version', entry.version)
        req.text = entry.package

    command = ET.SubElement(root, 'command')
    command.text = f'\n{body}\n  '

    inputs_el = ET.SubElement(root, 'inputs')
    for cp in inputs:
        inputs_el.append(ET.fromstring(emit_param_xml(cp)))
    outputs_el = ET.SubElement(root, 'outputs')
    for cp in outputs:
        outputs_el.append(ET.fromstring(emit_output_xml(cp)))

    entry_block = render_entry_points(interface, config)
    entry_points: Optional[Dict[str, object]] = None
    if entry_block is not None:
        root.append(entry_block)
        point = entry_block[0]
        entry_points = {'name': point.get('name'),
                        'port': int(point.get('port')),
                        'url': point[0].text}

    help_text = render_help(interface)
    if help_text:
        help_el = ET.SubElement(root, 'help')
        help_el.text = help_text

    citations = ET.SubElement(root, 'citations')
    for doi in config.citation_dois:
        citation = ET.SubElement(citations, 'citation')
        citation.set('type', 'doi')
        citation.text = doi

    xml_text = canonical_serialize(root)
    return WrapperDocument(
        tool_id=root.get('id'),
        tool_name=interface.tool_name,
        version=config.version_string,
        requirements=[(e.package, e.version) for e in deps.entries],
        inputs=[emit_param_xml(cp) for cp in inputs],
        outputs=[emit_output_xml(cp) for cp in outputs],
        command_text=body,
        entry_points=entry_points,
        help_text=help_text,
        citations=list(config.citation_dois),
        xml_text=xml_text,
    )


def roundtrip_is_stable(xml_text: str) -> bool:
    """True when parse + re-serialize reproduces the exact bytes."""
    return canonical_serialize(parse_xml(xml_text)) == xml_text
