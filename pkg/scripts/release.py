#!/usr/bin/env python3
"""Tag a release of rsvddpd.

Sets the version in pyproject.toml and rsvddpd/__init__.py, runs the tests
not marked slow, then commits and tags ``v<version>``.

Usage:
    python scripts/release.py 0.2.0 [--dry-run]
"""
import argparse
import re
import shlex
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

VERSION_SITES = {
    'pyproject.toml': 'version',
    'rsvddpd/__init__.py': '__version__',
}


def set_version(version: str, dry_run: bool) -> None:
    for name, key in VERSION_SITES.items():
        path = ROOT / name
        text = path.read_text()
        pattern = re.compile(rf'^{key} = "[^"]+"', re.MULTILINE)
        updated, count = pattern.subn(f'{key} = "{version}"', text, count = 1)
        if count == 0:
            sys.exit(f"release: no version line in {name}")
        if not dry_run:
            path.write_text(updated)
        print(f"  {name}: {version}")


def step(command: str, dry_run: bool) -> None:
    print(f"  $ {command}")
    if dry_run:
        return
    if subprocess.run(shlex.split(command), cwd = ROOT).returncode != 0:
        sys.exit(f"release: '{command}' failed")


def main(argv = None) -> None:
    parser = argparse.ArgumentParser(description = __doc__.splitlines()[0])
    parser.add_argument('version')
    parser.add_argument('--dry-run', action = 'store_true')
    args = parser.parse_args(argv)
    if not re.fullmatch(r'\d+\.\d+\.\d+', args.version):
        parser.error(f"version must be X.Y.Z, got {args.version!r}")

    tag = f"v{args.version}"
    set_version(args.version, args.dry_run)
    step("pytest -q -m 'not slow'", args.dry_run)
    step("git add pyproject.toml rsvddpd/__init__.py", args.dry_run)
    step(f"git commit -m 'Release {tag}'", args.dry_run)
    step(f"git tag {tag}", args.dry_run)
    print(f"{tag} tagged; push with: git push && git push --tags")


if __name__ == '__main__':
    main()
