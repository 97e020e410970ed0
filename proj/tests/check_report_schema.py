"""Run the CLI on a scenario and validate report.json with the reference
jsonschema implementation (independent of the built-in validator)."""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main():
    cli, scenario, schema_path, out = sys.argv[1:5]
    proc = subprocess.run([cli, "run", scenario, "--out", out], capture_output=True, text=True)
    if proc.returncode not in (0, 2):
        print(proc.stdout, proc.stderr)
        return 1
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft7Validator.check_schema(schema)
    report = json.loads((pathlib.Path(out) / "report.json").read_text())
    errors = sorted(jsonschema.Draft7Validator(schema).iter_errors(report), key=str)
    for e in errors:
        print("/".join(map(str, e.absolute_path)), e.message)
    if errors:
        return 1
    # a hard-error report must validate too
    broken = {"scenario": report["scenario"],
              "status": {"exit_code": 1, "stage": "geometry", "message": "x", "checks": []}}
    jsonschema.validate(broken, schema)
    print("report.json valid:", scenario)
    return 0


if __name__ == "__main__":
    sys.exit(main())
