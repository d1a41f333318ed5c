#!/usr/bin/env python3
"""Validate contab's JSON output against the schemas shipped in schemas/.

Usage: validate_schemas.py CONTAB_BINARY SCHEMAS_DIR

Runs one representative invocation per subcommand/output variant and checks
the emitted JSON against the corresponding schema.  Exits non-zero on the
first schema violation or schema file defect.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def run(binary, args, expect_exit=0):
    proc = subprocess.run(
        [binary] + args, capture_output=True, text=True, timeout=300
    )
    if proc.returncode != expect_exit:
        raise SystemExit(
            f"FAIL: {' '.join(args)} exited {proc.returncode} "
            f"(expected {expect_exit}): {proc.stderr.strip()}"
        )
    return proc.stdout


def main():
    if len(sys.argv) != 3:
        raise SystemExit(__doc__)
    binary, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])

    schemas = {}
    for path in sorted(schema_dir.glob("*.schema.json")):
        with open(path) as fh:
            schema = json.load(fh)
        jsonschema.Draft7Validator.check_schema(schema)
        schemas[path.stem.replace(".schema", "")] = schema

    expected = {"margins", "count", "heuristic", "typical", "bounds",
                "scan", "figure", "verify"}
    if set(schemas) != expected:
        raise SystemExit(f"FAIL: schema set {sorted(schemas)} != {sorted(expected)}")

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        margins_doc = {"rows": [4, 2, 1], "cols": [3, 2, 2]}
        json.dump(margins_doc, fh)
        margins_file = fh.name
    jsonschema.validate(margins_doc, schemas["margins"])

    cases = [
        ("count", ["count", "--rows", "2,1", "--cols", "1,1,1", "--format", "json"], 0),
        ("count", ["count", "--margins-file", margins_file, "--log2", "--format", "json"], 0),
        ("count", ["count", "--n", "4", "--delta", "0.5", "--B", "2", "--C", "1",
                   "--format", "json"], 0),
        ("heuristic", ["heuristic", "--rows", "2,1", "--cols", "1,1,1", "--format", "json"], 0),
        ("heuristic", ["heuristic", "--rows", "2,1", "--cols", "1,1,1", "--exact",
                       "--count", "--log2", "--format", "json"], 0),
        ("heuristic", ["heuristic", "--n", "4", "--delta", "0.5", "--B", "2", "--C", "1",
                       "--count", "--format", "json"], 0),
        ("typical", ["typical", "--rows", "4,2,1", "--cols", "3,2,2", "--format", "json"], 0),
        ("typical", ["typical", "--rows", "2,0", "--cols", "1,1", "--format", "json"], 0),
        ("typical", ["typical", "--n", "100", "--delta", "0.5", "--B", "2", "--C", "1",
                     "--block", "--format", "json"], 0),
        ("bounds", ["bounds", "--rows", "4,2,1", "--cols", "3,2,2", "--format", "json"], 0),
        ("bounds", ["bounds", "--n", "20", "--delta", "0.5", "--B", "3", "--C", "1",
                    "--gamma", "0.5", "--format", "json"], 0),
        ("scan", ["scan", "--C", "1", "--B-min", "1", "--B-max", "4", "--B-steps", "7",
                  "--n-list", "20,600", "--format", "json"], 0),
        ("figure", ["figure", "--C-list", "0.5,1", "--B-min", "1", "--B-max", "4",
                    "--B-steps", "5", "--format", "json"], 0),
        ("verify", ["verify", "counting", "--format", "json"], 0),
        ("verify", ["verify", "typical", "--tol-margin", "10", "--max-iter", "3",
                    "--format", "json"], 4),
    ]

    for name, args, expect_exit in cases:
        doc = json.loads(run(binary, args, expect_exit))
        try:
            jsonschema.validate(doc, schemas[name])
        except jsonschema.ValidationError as err:
            raise SystemExit(
                f"FAIL: {' '.join(args)} violates {name}.schema.json: {err.message}"
            )
        print(f"ok - {' '.join(args)}")

    print(f"# validated {len(cases)} invocations against {len(schemas)} schemas")


if __name__ == "__main__":
    main()
