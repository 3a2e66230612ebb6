"""Runs the CLI on the shipped configs and validates configs and outputs against schema/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path) as fh:
        return json.load(fh)


def main():
    cli, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
    exp_schema = load(root / "schema" / "experiment.schema.json")
    rep_schema = load(root / "schema" / "report.schema.json")
    for s in (exp_schema, rep_schema):
        jsonschema.Draft202012Validator.check_schema(s)
    exp = jsonschema.Draft202012Validator(exp_schema)
    rec = jsonschema.Draft202012Validator(rep_schema)
    ident = jsonschema.Draft202012Validator({**rep_schema, "$ref": "#/$defs/identity_report"})

    commands = {
        "boundedness": "boundedness-scan",
        "thm3": "thm3-scan",
        "jacobian": "jacobian-estimate",
    }
    checked = 0
    with tempfile.TemporaryDirectory() as out:
        for cfg in sorted((root / "configs").glob("*.json")):
            exp.validate(load(cfg))
            sub = commands[cfg.stem.split("_")[0]]
            run = subprocess.run([str(cli), sub, "--config", str(cfg), "--out", out],
                                 capture_output=True, text=True)
            if run.returncode not in (0, 2):
                sys.exit(f"{cfg.name}: exit {run.returncode}\n{run.stderr}")
        subprocess.run([str(cli), "hessian-estimate", "--family", "2", "--t-max", "2",
                        "--out", out], check=True, capture_output=True)
        for records in pathlib.Path(out).glob("*/records.jsonl"):
            for line in records.read_text().splitlines():
                rec.validate(json.loads(line))
                checked += 1
        run = subprocess.run([str(cli), "verify-identities", "--dims", "2"],
                             capture_output=True, text=True, check=True)
        for r in json.loads(run.stdout):
            ident.validate(r)
            checked += 1

    bad = {"grid": {"d": 2, "n": 16, "spacing": 1.0}}
    if exp.is_valid(bad):
        sys.exit("unknown config key accepted by schema")
    print(f"validated {checked} documents")


if __name__ == "__main__":
    main()
