"""Validate `weilcat enumerate` output against the record schema."""
import json
import subprocess
import sys

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

checked = 0
for g, q in [(1, 2), (1, 9), (2, 2), (2, 4), (2, 9), (3, 2), (3, 4)]:
    out = subprocess.run([cli, "enumerate", str(g), str(q)], check=True, capture_output=True, text=True).stdout
    for line in out.splitlines():
        record = json.loads(line)
        errors = list(validator.iter_errors(record))
        if errors:
            sys.exit(f"{record.get('label')}: {errors[0].message}")
        if list(record) != sorted(record):
            sys.exit(f"{record['label']}: keys not sorted")
        checked += 1
print(f"{checked} records valid")
