"""Runs the CLI on the shipped fixtures and validates every report against its schema."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())


def run(args, schema, expect=0):
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "report.json"
        proc = subprocess.run([cli, *args, "--out", str(out)], cwd=root, capture_output=True, text=True)
        if proc.returncode != expect:
            sys.exit(f"{args}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
        doc = json.loads(out.read_text())
    jsonschema.Draft202012Validator(schemas[schema], registry=registry).validate(doc)
    print(f"ok  {' '.join(args)}  [{schema}]")
    return doc


for fixture in sorted((root / "fixtures").glob("*.json")):
    if fixture.name == "malformed.json":
        continue
    jsonschema.Draft202012Validator(schemas["scenario.schema.json"]).validate(json.loads(fixture.read_text()))
    print(f"ok  {fixture.name}  [scenario.schema.json]")

run(["decompose", "fixtures/genN-g.json", "--process", "f"], "decomposition.schema.json")
run(["decompose", "fixtures/genN-g.json", "--strategy", "auto"], "decomposition.schema.json")
run(["decompose", "fixtures/fixture-b.json"], "decomposition.schema.json", expect=1)
run(["price", "fixtures/fixture-a.json", "--claim", "call90"], "pricing.schema.json")
run(["price", "fixtures/fixture-a.json", "--claim", "put80", "--mode", "generators", "--generators", "S"],
    "pricing.schema.json")
run(["hedge", "fixtures/fixture-a.json", "--claim", "call90", "--stamp"], "pricing.schema.json")
report = run(["audit", "fixtures/fixture-b.json"], "audit.schema.json")
for entry in report:
    if entry["instance"] is not None:
        jsonschema.Draft202012Validator(schemas["scenario.schema.json"]).validate(entry["instance"])
run(["audit", "--claim-id", "lemma-tmars5", "--budget", "200", "--seed", "3"], "audit.schema.json")
