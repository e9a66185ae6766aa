"""Canonical XML serialization for wrapper documents."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import List

# Elements whose text is emitted inside a CDATA section.
CDATA_TAGS = frozenset({'command'})

_ATTR_ESCAPES = [('&', '&amp;'), ('<', '&lt;'), ('>', '&gt;'),
                 ('"', '&quot;'), ('\n', '&#10;'), ('\t', '&#9;'),
                 ('\r', '&#13;')]
_TEXT_ESCAPES = [('&', '&amp;'), ('<', '&lt;'), ('>', '&gt;')]


def escape_attr(value: str) -> str:
    for char, entity in _ATTR_ESCAPES:
        value = value.replace(char, entity)
    return value


def escape_text(value: str) -> str:
    for char, entity in _TEXT_ESCAPES:
        value = value.replace(char, entity)
    return value


def _is_comment(node: ET.Element) -> bool:
    return not isinstance(node.tag, str)


def serialize_element(node: ET.Element, depth: int = 0) -> str:
    """One element (or comment) in canonical form, no trailing newline."""
    indent = '  ' * depth
    if _is_comment(node):
        return f'{indent}<!--{node.text or ""}-->'
    attrs = ''.join(f' {k}="{escape_attr(str(v))}"'
                    for k, v in node.attrib.items())
    children = list(node)
    text = node.text or ''
    if node.tag in CDATA_TAGS:
        return f'{indent}<{node.tag}{attrs}><![CDATA[{text}]]></{node.tag}>'
    if not children:
        if not text.strip():
            closer = ' />' if attrs else '/>'
            return f'{indent}<{node.tag}{attrs}{closer}'
        return (f'{indent}<{node.tag}{attrs}>{escape_text(text)}'
                f'</{node.tag}>')
    lines: List[str] = [f'{indent}<{node.tag}{attrs}>']
    if text.strip():
        lines.append('  ' * (depth + 1) + escape_text(text.strip()))
    for child in children:
        lines.append(serialize_element(child, depth + 1))
    lines.append(f'{indent}</{node.tag}>')
    return '\n'.join(lines)


def canonical_serialize(root: ET.Element) -> str:
    """The whole document in canonical form, with a final newline."""
    return serialize_element(root, 0) + '\n'


def parse_xml(text: str) -> ET.Element:
    """Parse wrapper XML, keeping comment nodes for round-trips."""
    parser = ET.XMLParser(target=ET.TreeBuilder(insert_comments=True))
    return ET.fromstring(text, parser=parser)
