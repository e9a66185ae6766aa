"""wrapforge command line: batch generation and wrapper linting."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .classify import classify
from .deps import DependencySet, ManifestError, load_manifest
from .extraction import ExtractionFailure, extract_interface
from .generator import GeneratorConfig, RenderFailure, render_wrapper
from .kinds import build_metavar_map, build_name_fallbacks
from .lint import format_finding, has_errors, lint

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2

WarnFn = Callable[[str], None]


@dataclass
class BatchReport:
    total_scripts: int = 0
    skipped: List[str] = field(default_factory=list)
    succeeded: int = 0
    failed: List[Tuple[str, str]] = field(default_factory=list)
    warnings: int = 0
    lint_errors: int = 0

    def accounting_holds(self) -> bool:
        return self.total_scripts == (len(self.skipped) + self.succeeded
                                      + len(self.failed))

    def format_text(self) -> str:
        lines = ['wrapforge batch report']
        lines.append(f'total: {self.total_scripts}')
        skipped = f' ({", ".join(self.skipped)})' if self.skipped else ''
        lines.append(f'skipped: {len(self.skipped)}{skipped}')
        lines.append(f'succeeded: {self.succeeded}')
        failed = f' ({", ".join(f"{n}: {k}" for n, k in self.failed)})' \
            if self.failed else ''
        lines.append(f'failed: {len(self.failed)}{failed}')
        lines.append(f'warnings: {self.warnings}')
        lines.append(f'lint_errors: {self.lint_errors}')
        return '\n'.join(lines) + '\n'


def _has_python_shebang(path: Path) -> bool:
    try:
        with open(path, 'rb') as handle:
            first = handle.readline(200)
    except OSError:
        return False
    return first.startswith(b'#!') and b'python' in first


def discover_scripts(roots: Sequence[Path]) -> List[Path]:
    """Tool scripts under the roots, sorted for determinism."""
    found: List[Path] = []
    for root in roots:
        root = Path(root)
        if not root.is_dir():
            raise OSError(f'not a directory: {root}')
        for path in root.rglob('*'):
            if not path.is_file():
                continue
            if path.suffix == '.py' or (path.suffix == ''
                                        and _has_python_shebang(path)):
                found.append(path)
    return sorted(found, key=lambda p: (str(p.parent), p.name))


def _base_name(path: Path) -> str:
    return path.stem if path.suffix else path.name


def apply_skip_list(paths: Sequence[Path], skip_file: Path,
                    warn: Optional[WarnFn] = None
                    ) -> Tuple[List[Path], List[Path]]:
    """Partition paths into (kept, skipped) by base name."""
    warn = warn or logger.warning
    entries: List[str] = []
    for raw in Path(skip_file).read_text(encoding='utf-8').splitlines():
        line = raw.split('#', 1)[0].strip()
        if line:
            entries.append(line)
    names = {_base_name(p) for p in paths}
    for entry in entries:
        if entry not in names:
            warn(f'skip-list entry {entry!r} matches no discovered script')
    skip_set = set(entries)
    kept = [p for p in paths if _base_name(p) not in skip_set]
    skipped = [p for p in paths if _base_name(p) in skip_set]
    return kept, skipped


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wrapforge',
        description='Generate Galaxy tool wrappers from argparse scripts.')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='wrap every script under --in')
    gen.add_argument('--in', dest='roots', action='append', required=True,
                     metavar='DIR', help='script directory (repeatable)')
    gen.add_argument('--out', default='wrappers', metavar='DIR',
                     help='output directory for wrapper XML files')
    gen.add_argument('--skip-list', metavar='FILE',
                     help='text file of tool names to exclude')
    gen.add_argument('--version', default='1.0.0', metavar='TEXT',
                     help='version attribute for generated tools')
    gen.add_argument('--metavar-map', metavar='FILE',
                     help='metavar extension file (TOKEN=type[:format][:flags])')
    gen.add_argument('--name-fallbacks', metavar='FILE',
                     help='name-fallback override file (dest=type[...])')
    gen.add_argument('--interactive-port', type=int, default=8080,
                     metavar='N', help='port for interactive entry points')
    gen.add_argument('--guard-style', choices=['if', 'truevalue'],
                     default='truevalue',
                     help='how optional flags appear in the command block')
    gen.add_argument('--citation', dest='citations', action='append',
                     default=[], metavar='DOI',
                     help='citation DOI to embed (repeatable)')
    gen.add_argument('--report', metavar='FILE',
                     help='write the batch report here instead of stdout')

    lint_cmd = sub.add_parser('lint', help='lint existing wrapper XML files')
    lint_cmd.add_argument('files', nargs='+', metavar='XML',
                          help='wrapper files to check')
    return parser


def _wrap_one(path: Path, deps: DependencySet, metavar_map, name_fallbacks,
              config: GeneratorConfig, out_dir: Path, warn: WarnFn
              ) -> Tuple[bool, int]:
    """Returns (succeeded, lint_error_count) for one script."""
    source = path.read_text(encoding='utf-8')
    interface = extract_interface(source, path.name, warn=warn)
    params = [classify(spec, metavar_map, name_fallbacks, warn=warn)
              for spec in interface.arguments
              if spec.action not in ('help', 'version')]
    document = render_wrapper(interface, params, deps, config, warn=warn)
    findings = lint(document.xml_text)
    errors = [f for f in findings if f.severity == 'error']
    for finding in errors:
        warn(f'{document.tool_id}.xml: {format_finding(finding)}')
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f'{document.tool_id}.xml'
    out_path.write_text(document.xml_text, encoding='utf-8')
    return True, len(errors)


def run_generate(args: argparse.Namespace,
                 out_stream) -> Tuple[int, BatchReport]:
    report = BatchReport()

    def warn(message: str) -> None:
        report.warnings += 1
        logger.warning(message)

    try:
        config = GeneratorConfig(
            version_string=args.version,
            interactive_port=args.interactive_port,
            metavar_map_extension_path=args.metavar_map,
            name_fallback_path=args.name_fallbacks,
            guard_style='if_block' if args.guard_style == 'if'
            else args.guard_style,
            output_dir=args.out,
            citation_dois=list(args.citations),
        )
        metavar_map = build_metavar_map(config.metavar_map_extension_path,
                                        warn=warn)
        name_fallbacks = build_name_fallbacks(config.name_fallback_path,
                                              warn=warn)
        roots = [Path(r) for r in args.roots]
        scripts = discover_scripts(roots)
        if args.skip_list:
            kept, skipped = apply_skip_list(scripts, Path(args.skip_list),
                                            warn=warn)
        else:
            kept, skipped = scripts, []
    except (OSError, ValueError) as err:
        print(f'wrapforge: {err}', file=sys.stderr)
        return EXIT_USAGE, report

    report.total_scripts = len(scripts)
    report.skipped = [_base_name(p) for p in skipped]

    manifests: Dict[Path, DependencySet] = {}
    for root in roots:
        try:
            deps = load_manifest(root, warn=warn)
            if deps.source_format == 'none' and root.parent != root:
                deps = load_manifest(root.parent, warn=warn)
        except ManifestError as err:
            warn(f'{root}: manifest unusable ({err}); continuing without '
                 'requirements')
            deps = DependencySet([], 'none')
        manifests[root] = deps

    out_dir = Path(args.out)
    for path in kept:
        root = next((r for r in roots if r == path or r in path.parents),
                    roots[0])
        try:
            _, lint_errors = _wrap_one(path, manifests[root], metavar_map,
                                       name_fallbacks, config, out_dir, warn)
            report.succeeded += 1
            report.lint_errors += lint_errors
        except ExtractionFailure as err:
            report.failed.append((_base_name(path), err.kind))
            warn(f'{path.name}: extraction failed ({err})')
        except RenderFailure as err:
            report.failed.append((_base_name(path), 'render'))
            warn(f'{path.name}: render failed ({err})')
        except OSError as err:
            report.failed.append((_base_name(path), 'io'))
            warn(f'{path.name}: {err}')

    text = report.format_text()
    if args.report:
        Path(args.report).write_text(text, encoding='utf-8')
    else:
        out_stream.write(text)

    code = EXIT_OK if not report.failed and report.lint_errors == 0 \
        else EXIT_FAILURES
    return code, report


def run_lint(args: argparse.Namespace, out_stream) -> int:
    any_errors = False
    for name in args.files:
        path = Path(name)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as err:
            print(f'wrapforge: {err}', file=sys.stderr)
            return EXIT_USAGE
        findings = lint(text)
        any_errors = any_errors or has_errors(findings)
        if not findings:
            out_stream.write(f'{name}: clean\n')
        for finding in findings:
            out_stream.write(f'{name}: {format_finding(finding)}\n')
    return EXIT_FAILURES if any_errors else EXIT_OK


def run(argv: Sequence[str], out_stream=None) -> int:
    """Entry point returning an exit code; report goes to out_stream."""
    out_stream = out_stream if out_stream is not None else sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_err:
        # argparse exits with 2 on usage errors and 0 on --help.
        return int(exit_err.code or 0)
    if args.command == 'generate':
        code, _ = run_generate(args, out_stream)
        return code
    return run_lint(args, out_stream)


def main() -> None:  # pragma: no cover - thin console-script shim
    logging.basicConfig(level=logging.WARNING,
                        format='%(levelname)s %(message)s')
    sys.exit(run(sys.argv[1:]))
