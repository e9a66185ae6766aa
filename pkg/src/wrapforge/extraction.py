"""Static recovery of a script's argparse interface, without running it."""

from __future__ import annotations

import ast
import logging
import pathlib
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

ACTIONS = ('store', 'store_true', 'store_false', 'append', 'count',
           'version', 'help')

_NARGS_SYMBOLS = {'?': 'optional_single', '*': 'zero_or_more',
                  '+': 'one_or_more'}

_TYPE_NAMES = {'int': 'integer', 'float': 'float', 'str': 'text'}

# Keywords that map onto ArgumentSpec fields.
_RECOGNIZED = ('dest', 'help', 'default', 'required', 'metavar', 'action',
               'type', 'choices', 'nargs')
# Keywords that are legal argparse usage but carry no Galaxy meaning.
_SILENT = ('version',)

WarnFn = Callable[[str], None]


class ExtractionFailure(Exception):
    """Extraction could not produce an interface; kind names the failure."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


class DeclarationSkipped(Exception):
    """A single declaration that cannot be recovered statically."""

    def __init__(self, lineno: int, reason: str) -> None:
        super().__init__(f'line {lineno}: {reason}')
        self.lineno = lineno


@dataclass
class ArgumentSpec:
    """One argument declaration, flattened out of any group structure."""

    dest: str
    flags: List[str] = field(default_factory=list)
    positional_name: Optional[str] = None
    help_text: str = ''
    default_value: Any = None
    required: bool = False
    metavar: Optional[str] = None
    action: str = 'store'
    value_type_hint: str = 'unspecified'
    choices: Optional[List[Any]] = None
    nargs: Union[int, str, None] = None
    source_order: int = 0


@dataclass
class ToolInterface:
    """The complete extracted command-line interface of one script."""

    tool_name: str
    description: Optional[str]
    epilog: Optional[str]
    arguments: List[ArgumentSpec]
    provides_tags: List[str]
    is_interactive: bool
    source_path: str


class _Unresolved:
    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return '<unresolved>'


UNRESOLVED = _Unresolved()


def _resolve(node: ast.AST, constants: Dict[str, Any]) -> Any:
    """Resolve a literal expression, following module constants one level."""
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return constants.get(node.id, UNRESOLVED)
    if isinstance(node, (ast.List, ast.Tuple)):
        items = [_resolve(e, constants) for e in node.elts]
        if any(v is UNRESOLVED for v in items):
            return UNRESOLVED
        return items
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        value = _resolve(node.operand, constants)
        if isinstance(value, (int, float)):
            return -value
        return UNRESOLVED
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Add):
        left = _resolve(node.left, constants)
        right = _resolve(node.right, constants)
        if isinstance(left, str) and isinstance(right, str):
            return left + right
        return UNRESOLVED
    return UNRESOLVED


def _module_constants(tree: ast.Module) -> Dict[str, Any]:
    """Literal module-level assignments, usable one level deep."""
    constants: Dict[str, Any] = {}
    doc = ast.get_docstring(tree)
    if doc is not None:
        constants['__doc__'] = doc
    for stmt in tree.body:
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 \
                and isinstance(stmt.targets[0], ast.Name):
            value = _resolve(stmt.value, {'__doc__': doc})
            if value is not UNRESOLVED:
                constants[stmt.targets[0].id] = value
    return constants


def _iter_region(stmts: List[ast.stmt]):
    """Simple module-scope statements, recursing into compound blocks but
    never into function or class bodies."""
    for stmt in stmts:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef,
                             ast.ClassDef)):
            continue
        blocks: List[List[ast.stmt]] = []
        if isinstance(stmt, (ast.If, ast.For, ast.While)):
            blocks = [stmt.body, stmt.orelse]
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            blocks = [stmt.body]
        elif isinstance(stmt, ast.Try):
            blocks = [stmt.body, stmt.orelse, stmt.finalbody]
            blocks.extend(h.body for h in stmt.handlers)
        if blocks:
            # Compound statement: only its nested blocks can hold
            # declarations of interest.
            for block in blocks:
                yield from _iter_region(block)
        else:
            yield stmt


def _parse_call(call: ast.Call, constants: Dict[str, Any],
                warn: WarnFn, prefix: str) -> ArgumentSpec:
    """Turn one add_argument call into an ArgumentSpec."""
    lineno = call.lineno
    names: List[str] = []
    for arg in call.args:
        value = _resolve(arg, constants)
        if not isinstance(value, str):
            raise DeclarationSkipped(lineno, 'flag names are not literal text')
        names.append(value)
    if not names:
        raise DeclarationSkipped(lineno, 'declaration has no flag names')

    flags: List[str] = []
    positional_name: Optional[str] = None
    if names[0].startswith('-'):
        if not all(n.startswith('-') for n in names):
            raise DeclarationSkipped(lineno, 'mixed flag and positional names')
        flags = names
    else:
        if len(names) != 1:
            raise DeclarationSkipped(lineno, 'multiple positional names')
        positional_name = names[0]

    spec = ArgumentSpec(dest='', flags=flags, positional_name=positional_name)
    explicit_default = False
    explicit_required = False
    for kw in call.keywords:
        if kw.arg is None:
            warn(f'{prefix} line {lineno}: **kwargs in declaration ignored')
            continue
        value = _resolve(kw.value, constants)
        if kw.arg == 'dest':
            if isinstance(value, str):
                spec.dest = value
            else:
                raise DeclarationSkipped(lineno, 'dest is not literal text')
        elif kw.arg == 'help':
            if isinstance(value, str):
                spec.help_text = value
            else:
                warn(f'{prefix} line {lineno}: unresolvable help text dropped')
        elif kw.arg == 'default':
            if value is UNRESOLVED:
                warn(f'{prefix} line {lineno}: unresolvable default dropped')
            else:
                spec.default_value = value
                explicit_default = True
        elif kw.arg == 'required':
            if isinstance(value, bool):
                spec.required = value
                explicit_required = True
            else:
                warn(f'{prefix} line {lineno}: unresolvable required dropped')
        elif kw.arg == 'metavar':
            if isinstance(value, str):
                spec.metavar = value
            elif isinstance(value, list) and value \
                    and isinstance(value[0], str):
                spec.metavar = value[0]
                warn(f'{prefix} line {lineno}: metavar tuple, first entry used')
            else:
                warn(f'{prefix} line {lineno}: unresolvable metavar dropped')
        elif kw.arg == 'action':
            if isinstance(value, str) and value in ACTIONS:
                spec.action = value
            else:
                shown = value if isinstance(value, str) else 'non-literal'
                warn(f'{prefix} line {lineno}: unsupported action '
                     f'{shown!r}, treated as store')
        elif kw.arg == 'type':
            name = kw.value.id if isinstance(kw.value, ast.Name) else None
            if name in _TYPE_NAMES:
                spec.value_type_hint = _TYPE_NAMES[name]
            else:
                warn(f'{prefix} line {lineno}: unsupported type callable')
        elif kw.arg == 'choices':
            if isinstance(value, list) and value:
                spec.choices = value
            else:
                warn(f'{prefix} line {lineno}: unresolvable choices dropped')
        elif kw.arg == 'nargs':
            if isinstance(value, int) and not isinstance(value, bool):
                spec.nargs = value
            elif isinstance(value, str) and value in _NARGS_SYMBOLS:
                spec.nargs = _NARGS_SYMBOLS[value]
            elif isinstance(kw.value, ast.Attribute) \
                    and kw.value.attr == 'REMAINDER':
                spec.nargs = 'zero_or_more'
                warn(f'{prefix} line {lineno}: REMAINDER treated as '
                     'zero-or-more')
            else:
                warn(f'{prefix} line {lineno}: unresolvable nargs dropped')
        elif kw.arg in _SILENT:
            pass
        else:
            warn(f'{prefix} line {lineno}: unrecognized keyword '
                 f'{kw.arg!r} ignored')

    if spec.action in ('store_true', 'store_false', 'count'):
        if spec.metavar is not None:
            warn(f'{prefix} line {lineno}: metavar dropped for '
                 f'{spec.action} action')
            spec.metavar = None
        if spec.choices is not None:
            warn(f'{prefix} line {lineno}: choices dropped for '
                 f'{spec.action} action')
            spec.choices = None
        if not explicit_default and spec.action != 'count':
            spec.default_value = spec.action == 'store_false'

    if not spec.dest:
        spec.dest = _derive_dest(spec)
    if not spec.dest.isidentifier():
        raise DeclarationSkipped(lineno,
                                 f'derived dest {spec.dest!r} is not an '
                                 'identifier')
    if not explicit_required:
        if positional_name is not None:
            spec.required = spec.nargs not in ('optional_single',
                                               'zero_or_more')
        else:
            spec.required = False
    return spec


def _derive_dest(spec: ArgumentSpec) -> str:
    if spec.positional_name is not None:
        return spec.positional_name.replace('-', '_')
    longs = [f for f in spec.flags if f.startswith('--')]
    pool = longs or spec.flags
    best = max(pool, key=len)
    return best.lstrip('-').replace('-', '_')


def parse_declaration(call_source: str, source_order: int = 0,
                      warn: Optional[WarnFn] = None) -> ArgumentSpec:
    """Parse one add_argument-style call given as source text."""
    warn = warn or logger.warning
    try:
        tree = ast.parse(call_source.strip(), mode='eval')
    except SyntaxError as err:
        raise DeclarationSkipped(getattr(err, 'lineno', 1) or 1,
                                 'declaration does not parse') from err
    node = tree.body
    if not isinstance(node, ast.Call):
        raise DeclarationSkipped(1, 'not a call expression')
    spec = _parse_call(node, {}, warn, 'declaration')
    spec.source_order = source_order
    return spec


def detect_provides(source_text: str,
                    warn: Optional[WarnFn] = None) -> List[str]:
    """String elements of a module-level __provides__ assignment."""
    warn = warn or logger.warning
    try:
        tree = ast.parse(source_text)
    except SyntaxError:
        return []
    tags: List[str] = []
    for stmt in tree.body:
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 \
                and isinstance(stmt.targets[0], ast.Name) \
                and stmt.targets[0].id == '__provides__':
            if isinstance(stmt.value, (ast.List, ast.Tuple)) and all(
                    isinstance(e, ast.Constant) and isinstance(e.value, str)
                    for e in stmt.value.elts):
                tags = [e.value for e in stmt.value.elts]
            else:
                warn('__provides__ is not a literal list of text; ignored')
                tags = []
    return tags


class _ParserInfo:
    def __init__(self, description: Optional[str],
                 epilog: Optional[str]) -> None:
        self.description = description
        self.epilog = epilog
        self.declarations: List[Tuple[int, ArgumentSpec]] = []


def _is_parser_construction(call: ast.Call) -> bool:
    func = call.func
    if isinstance(func, ast.Name):
        return func.id == 'ArgumentParser'
    return isinstance(func, ast.Attribute) and func.attr == 'ArgumentParser'


def extract_interface(source_text: str, script_name: str,
                      warn: Optional[WarnFn] = None) -> ToolInterface:
    """Extract the full interface of one script.

    Raises ExtractionFailure with kind syntax, no_parser, dynamic, or
    duplicate; partial results with warnings are preferred whenever at
    least one declaration resolves.
    """
    warn = warn or logger.warning
    prefix = script_name
    try:
        tree = ast.parse(source_text)
    except SyntaxError as err:
        raise ExtractionFailure(
            'syntax', f'{prefix}: source does not parse: {err}') from err

    constants = _module_constants(tree)
    parsers: Dict[str, _ParserInfo] = {}
    groups: Dict[str, str] = {}
    subparser_vars: set = set()
    subcommand_vars: set = set()
    call_sites = 0
    resolved = 0
    site_counter = 0

    def receiver_root(name: str) -> Optional[str]:
        if name in parsers:
            return name
        if name in groups:
            return groups[name]
        return None

    for stmt in _iter_region(tree.body):
        assigned: Optional[str] = None
        assigned_call: Optional[ast.Call] = None
        if isinstance(stmt, ast.Assign) and len(stmt.targets) == 1 \
                and isinstance(stmt.targets[0], ast.Name) \
                and isinstance(stmt.value, ast.Call):
            assigned = stmt.targets[0].id
            assigned_call = stmt.value
        for call in ast.walk(stmt):
            if not isinstance(call, ast.Call):
                continue
            target = assigned if call is assigned_call else None
            if _is_parser_construction(call):
                if target is None:
                    continue
                kwargs = {kw.arg: _resolve(kw.value, constants)
                          for kw in call.keywords if kw.arg}
                description = kwargs.get('description')
                epilog = kwargs.get('epilog')
                if description is UNRESOLVED:
                    warn(f'{prefix}: parser description is not statically '
                         'resolvable')
                    description = None
                if epilog is UNRESOLVED:
                    warn(f'{prefix}: parser epilog is not statically '
                         'resolvable')
                    epilog = None
                parsers[target] = _ParserInfo(description, epilog)
                continue
            func = call.func
            if not isinstance(func, ast.Attribute) \
                    or not isinstance(func.value, ast.Name):
                continue
            base = func.value.id
            if func.attr == 'add_argument':
                if base in subcommand_vars:
                    continue
                root = receiver_root(base)
                if root is None:
                    continue
                call_sites += 1
                try:
                    spec = _parse_call(call, constants, warn, prefix)
                except DeclarationSkipped as skip:
                    warn(f'{prefix} line {skip.lineno}: declaration '
                         f'skipped ({skip})')
                    continue
                parsers[root].declarations.append((site_counter, spec))
                site_counter += 1
                resolved += 1
            elif func.attr in ('add_argument_group',
                               'add_mutually_exclusive_group'):
                root = receiver_root(base)
                if root is not None and target is not None:
                    groups[target] = root
            elif func.attr == 'add_subparsers':
                if receiver_root(base) is not None:
                    warn(f'{prefix} line {call.lineno}: subparsers are not '
                         'supported; nested commands ignored')
                    if target is not None:
                        subparser_vars.add(target)
            elif func.attr == 'add_parser':
                if base in subparser_vars and target is not None:
                    subcommand_vars.add(target)

    if not parsers:
        raise ExtractionFailure(
            'no_parser', f'{prefix}: no argument-parser construction found')
    if call_sites >= 1 and resolved == 0:
        raise ExtractionFailure(
            'dynamic', f'{prefix}: no declaration could be resolved '
            'statically')

    chosen_name = max(parsers, key=lambda n: len(parsers[n].declarations))
    if len(parsers) > 1:
        warn(f'{prefix}: multiple parsers found; using {chosen_name!r} '
             'with the most declarations')
    chosen = parsers[chosen_name]

    arguments = [spec for _, spec in sorted(chosen.declarations)]
    for order, spec in enumerate(arguments):
        spec.source_order = order

    seen_dests: Dict[str, str] = {}
    seen_flags: Dict[str, str] = {}
    for spec in arguments:
        if spec.dest in seen_dests:
            raise ExtractionFailure(
                'duplicate', f'{prefix}: dest {spec.dest!r} declared twice')
        seen_dests[spec.dest] = spec.dest
        for flag in spec.flags:
            if flag in seen_flags:
                raise ExtractionFailure(
                    'duplicate', f'{prefix}: flag {flag!r} declared twice')
            seen_flags[flag] = spec.dest

    provides = detect_provides(source_text, warn=warn)
    tool_name = pathlib.PurePath(script_name).name
    if '.' in tool_name:
        tool_name = tool_name.rsplit('.', 1)[0]
    return ToolInterface(
        tool_name=tool_name,
        description=chosen.description,
        epilog=chosen.epilog,
        arguments=arguments,
        provides_tags=provides,
        is_interactive='interactive' in provides,
        source_path=script_name,
    )
