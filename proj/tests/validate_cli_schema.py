#!/usr/bin/env python3
"""Runs each subcommand with --format json and validates the output."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema

RUNS = [
    ["ppv", "--alpha", "0.05", "--gamma", "0.2", "--prior", "0.1", "--n", "5", "--j", "2"],
    ["posterior", "--interest", "gamma:1,0.05", "--j-max", "3", "--k-max", "2"],
    ["posterior", "--interest", "uniform:3", "--j", "1", "--k", "1"],
    ["region", "--beta-grid", "0.1,0.5,5", "--kappa-grid", "0.5,2,3"],
    ["homogeneous", "--alpha", "0.05", "--p", "0.025", "--shift", "1"],
    ["homogeneous", "--alpha", "0.05", "--p", "0.025", "--power-table", "{data}/power_shift1.csv"],
    ["simulate", "--samples", "20000", "--seed", "1"],
    ["simulate", "--samples", "1", "--oracle", "montecarlo"],
    ["simulate", "--oracle", "quadrature", "--interest", "uniform:2", "--j-max", "2", "--k-max", "2"],
    ["simulate", "--model", "homogeneous", "--alpha", "0.05", "--p", "0.02", "--shift", "2", "--samples", "20000"],
    ["--config", "{data}/region_config.json"],
]


def main() -> int:
    tool, schema_path, data = sys.argv[1], Path(sys.argv[2]), sys.argv[3]
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in RUNS:
        args = [a.replace("{data}", data) for a in args]
        proc = subprocess.run([tool, *args, "--format", "json"], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        errors = list(validator.iter_errors(json.loads(proc.stdout)))
        for e in errors:
            print(f"FAIL {' '.join(args)}: {e.json_path}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {' '.join(args)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
