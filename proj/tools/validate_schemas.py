#!/usr/bin/env python3
"""Runs the CLI on a handful of inputs and validates each JSON document against schema/."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

root = pathlib.Path(__file__).resolve().parent.parent
cli = sys.argv[1]

schemas = {p.name: json.loads(p.read_text()) for p in (root / "schema").glob("*.schema.json")}
registry = Registry().with_resources(
    [(name, Resource.from_contents(s)) for name, s in schemas.items()]
    + [(s["$id"], Resource.from_contents(s)) for s in schemas.values()]
)


def check(schema_file, args, codes=(0,)):
    run = subprocess.run([cli, *args], capture_output=True, text=True)
    if run.returncode not in codes:
        sys.exit(f"{' '.join(args)}: exit {run.returncode}\n{run.stderr}")
    doc = json.loads(run.stdout)
    jsonschema.Draft202012Validator(schemas[schema_file], registry=registry).validate(doc)
    print(f"ok  {schema_file:24} {' '.join(args)}")
    return doc


check("table.schema.json", ["table", "--family", "curl", "--format", "json"])
check("table.schema.json", ["table", "--family", "div", "--n", "4", "--format", "json"])
check("verdict.schema.json", ["classify", "--A", "sym", "--B-part", "skewtr", "--base", "curl"])
check("verdict.schema.json", ["classify", "--A", "dev", "--base", "div", "--n", "5"])
check("kernel.schema.json", ["kernel", "--A", "dev", "--B-part", "sym", "--base", "inc"])
check("kernel.schema.json", ["kernel", "--A", "dev", "--B-part", "sym", "--base", "curl"], codes=(3,))
check("campaign.schema.json", ["verify", "--preset", "example-1.1"])
check("campaign.schema.json", ["verify", "--preset", "korn-normalized", "--grid", "32", "--random-fields", "4"])
check("campaign.schema.json", ["verify", "--preset", "scaling-p1.5-n2", "--grid", "128"])
check("campaign.schema.json", ["verify", "--preset", "kms1", "--A", "dev", "--B-part", "sym", "--grid", "32",
                               "--random-fields", "2", "--bump-fields", "2"])
check("campaign.schema.json", ["verify", "--preset", "kms1-curl-table", "--grid", "32", "--random-fields", "2",
                               "--bump-fields", "2"])

with tempfile.TemporaryDirectory() as tmp:
    subprocess.run([cli, "table", "--family", "inc", "--out", tmp], check=True, capture_output=True)
    for w in sorted(pathlib.Path(tmp, "witnesses").glob("*.json")):
        jsonschema.Draft202012Validator(schemas["verdict.schema.json"], registry=registry).validate(
            json.loads(w.read_text()))
    print("ok  witness files")
