"""Structural lint checks over wrapper XML."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .xmlbuild import parse_xml

# Check registry: code -> (severity, one-line description).
CHECKS = {
    'E1': ('error', 'document is not well-formed XML'),
    'E2': ('error', 'missing tool root or id/name/version'),
    'E3': ('error', 'duplicate param/data names'),
    'E4': ('error', 'command references an undeclared variable'),
    'E5': ('error', 'unbalanced #if/#end if'),
    'W1': ('warning', 'missing tests section'),
    'W2': ('warning', 'missing help'),
    'W3': ('warning', 'empty citations'),
}

_VAR_TOKEN = re.compile(r'\$\{?([A-Za-z_][A-Za-z0-9_]*)\}?')
_SET_LINE = re.compile(r'^\s*#set\s+\$([A-Za-z_][A-Za-z0-9_]*)', re.MULTILINE)
_IF_TOKEN = re.compile(r'#if\b')
_END_IF_TOKEN = re.compile(r'#end if\b')
_COMMENT_LINE = re.compile(r'##[^\n]*')


@dataclass(frozen=True)
class Finding:
    severity: str
    code: str
    message: str
    location: Optional[str] = None


def _finding(code: str, message: str, location: Optional[str] = None) -> Finding:
    severity, _ = CHECKS[code]
    return Finding(severity, code, message, location)


def lint(document_text: str) -> List[Finding]:
    """Run every registered check; never raises."""
    try:
        root = parse_xml(document_text)
    except Exception as err:
        return [_finding('E1', f'not well-formed XML: {err}')]

    findings: List[Finding] = []

    if root.tag != 'tool':
        findings.append(_finding('E2', f'root element is <{root.tag}>, '
                                 'expected <tool>', location='/'))
    for attr in ('id', 'name', 'version'):
        if not (root.get(attr) or '').strip():
            findings.append(_finding('E2', f'tool has no {attr} attribute',
                                     location='tool'))

    names: List[str] = []
    for element in root.iter():
        if element.tag in ('param', 'data'):
            name = element.get('name')
            if name:
                names.append(name)
    seen = set()
    for name in names:
        if name in seen:
            findings.append(_finding('E3', f'name {name!r} declared more '
                                     'than once', location='inputs/outputs'))
        seen.add(name)

    command = root.find('command')
    command_text = (command.text or '') if command is not None else ''
    declared = set(names) | set(_SET_LINE.findall(command_text))
    scannable = _COMMENT_LINE.sub('', command_text)
    reported = set()
    for token in _VAR_TOKEN.findall(scannable):
        if token not in declared and token not in reported:
            reported.add(token)
            findings.append(_finding('E4', f'command references undeclared '
                                     f'variable ${token}', location='command'))
    if len(_IF_TOKEN.findall(command_text)) \
            != len(_END_IF_TOKEN.findall(command_text)):
        findings.append(_finding('E5', 'unbalanced #if/#end if in command',
                                 location='command'))

    if root.find('tests') is None:
        findings.append(_finding('W1', 'no tests section',
                                 location='tool'))
    help_el = root.find('help')
    if help_el is None or not (help_el.text or '').strip():
        findings.append(_finding('W2', 'no help text', location='tool'))
    citations = root.find('citations')
    if citations is None or len(citations) == 0:
        findings.append(_finding('W3', 'citations section is empty',
                                 location='tool'))

    return findings


def has_errors(findings: List[Finding]) -> bool:
    return any(f.severity == 'error' for f in findings)


def format_finding(finding: Finding) -> str:
    location = f' [{finding.location}]' if finding.location else ''
    return f'{finding.code} {finding.severity}: {finding.message}{location}'
