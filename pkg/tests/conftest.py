"""Terminal summary: one visible pass/fail line per acceptance criterion."""

import re

_CRITERION = re.compile(r'test_(criterion_\d+[a-z]?)_?(\w*)')


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome, label in (('passed', 'PASS'), ('failed', 'FAIL'),
                           ('error', 'FAIL'), ('skipped', 'SKIP')):
        for report in terminalreporter.stats.get(outcome, []):
            if 'test_acceptance' not in report.nodeid:
                continue
            if getattr(report, 'when', 'call') not in ('call', 'setup'):
                continue
            match = _CRITERION.search(report.nodeid)
            if match:
                name = match.group(1)
                if match.group(2):
                    name += f' ({match.group(2)})'
                rows.append((name, label))
    if not rows:
        return
    terminalreporter.section('acceptance criteria')
    for name, label in sorted(rows):
        terminalreporter.write_line(f'{name}: {label}')
