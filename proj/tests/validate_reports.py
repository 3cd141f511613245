"""Runs the CLI over representative invocations and validates every report
against docs/report_schema.json."""

import json
import subprocess
import sys

import jsonschema

INVOCATIONS = [
    ["validate", "--surface", "mlc"],
    ["validate", "--surface", "z1*("],
    ["validate", "--surface", "z1*zb1"],
    ["invariants", "--surface", "quartic-cone", "--samples", "3"],
    ["invariants", "--surface", "mlc", "--samples", "3", "--mode", "float"],
    ["classify", "--surface", "quartic-cone", "--samples", "4"],
    ["classify", "--surface", "mlc-shear", "--samples", "4"],
    ["verify", "--suite", "all", "--samples", "6"],
]


def main(cli, schema_path):
    with open(schema_path) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in INVOCATIONS:
        proc = subprocess.run([cli, *args], capture_output=True, text=True)
        try:
            validator.validate(json.loads(proc.stdout))
            print("ok  ", " ".join(args))
        except (json.JSONDecodeError, jsonschema.ValidationError) as e:
            failures += 1
            print("FAIL", " ".join(args), "\n   ", str(e).splitlines()[0])
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
