#!/usr/bin/env python3
"""Runs the CLI on bundled fixtures and validates each summary.json against
docs/summary.schema.json.

  check_summary_schema.py <ohsent binary> <work dir>
"""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema

ROOT = Path(__file__).resolve().parents[2]
DATA = ROOT / "tests" / "data"
SCHEMA = json.loads((ROOT / "docs" / "summary.schema.json").read_text())

RUNS = {
    # full run: both levels, sampling and emotion profiles
    "minicorpus": ["run", "--config", str(DATA / "minicorpus_config.json")],
    # no seed or sampling configured; lenient mode with a dropped unit
    "lenient": ["run", "--config", str(DATA / "fixture_config.json"),
                "--input", str(DATA / "lenient_one_gap.jsonl"), "--mode", "lenient"],
    # single level
    "utterance_only": ["run", "--config", str(DATA / "fixture_config.json"),
                       "--input", str(DATA / "valid_min.jsonl"), "--level", "utterance"],
}


def main():
    binary, work = sys.argv[1], Path(sys.argv[2])
    validator = jsonschema.Draft202012Validator(SCHEMA)
    failures = 0
    for name, args in RUNS.items():
        out = work / name
        proc = subprocess.run([binary, *args, "--out", str(out)], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{name}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        doc = json.loads((out / "summary.json").read_text())
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        print(f"{name}: {'valid' if not errors else 'INVALID'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
