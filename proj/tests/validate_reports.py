"""Run the CLI, write reports with --out and validate them against docs/schema."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

tool, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())


def validate(instance, schema_name):
    jsonschema.Draft202012Validator(schemas[schema_name], registry=registry).validate(instance)


failures = 0
with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    def run(args, expect_code):
        out = tmp / "report.json"
        proc = subprocess.run([tool, *args, "--out", str(out)], capture_output=True, text=True)
        if proc.returncode != expect_code:
            raise AssertionError(f"{args}: exit {proc.returncode}, expected {expect_code}: {proc.stderr}")
        report = json.loads(out.read_text())
        validate(report, "report.schema.json")
        if report["payload"] != json.loads(proc.stdout):
            raise AssertionError(f"{args}: report payload differs from stdout")
        return report["payload"]

    def case(name, args, expect_code, schema):
        global failures
        try:
            payload = run(args, expect_code)
            if schema:
                validate(payload, schema)
            print(f"ok   {name}")
        except (AssertionError, jsonschema.ValidationError) as e:
            failures += 1
            print(f"FAIL {name}: {e}")

    for name in ["eph", "laryngeal-observed", "laryngeal-fitted", "ex-intersection", "ex-coarsening",
                 "ex-markov-combination", "ex-4cycle"]:
        case(f"data show {name}", ["data", "show", "--name", name], 0, "table.schema.json")
        (tmp / f"{name}.json").write_text(subprocess.run([tool, "data", "show", "--name", name],
                                                         capture_output=True, text=True).stdout)
    case("data show mathmarks", ["data", "show", "--name", "mathmarks"], 0, "gaussian.schema.json")
    (tmp / "mathmarks.json").write_text(subprocess.run([tool, "data", "show", "--name", "mathmarks"],
                                                       capture_output=True, text=True).stdout)

    case("check mtp2 eph", ["check", "mtp2", "--in", str(tmp / "eph.json")], 0, "mtp2-verdict.schema.json")
    case("check mtp2 ex-markov-combination", ["check", "mtp2", "--in", str(tmp / "ex-markov-combination.json")], 1,
         "mtp2-verdict.schema.json")
    case("check mtp2 pairwise", ["check", "mtp2", "--method", "pairwise", "--in", str(tmp / "ex-4cycle.json")], 1,
         "mtp2-verdict.schema.json")
    case("check gauss mathmarks", ["check", "gauss", "--in", str(tmp / "mathmarks.json")], 1, "gauss-verdict.schema.json")
    case("sample volume", ["sample", "volume", "--kind", "gaussian", "--d", "3", "--n", "500", "--seed", "5"], 0,
         "estimate.schema.json")
    case("sample volume constrained", ["sample", "volume", "--kind", "binary", "--constraint", "two-ci", "--n", "500",
                                       "--seed", "5"], 0, "estimate.schema.json")
    case("derive model", ["derive", "model", "--in", str(tmp / "ex-coarsening.json")], 0, None)
    case("check axiom", ["check", "axiom", "--in", str(tmp / "ex-intersection.json")], 1, None)

    # a report is itself accepted as input
    report = tmp / "saved.json"
    subprocess.run([tool, "data", "show", "--name", "eph", "--out", str(report)], capture_output=True, check=True)
    case("report as input", ["check", "mtp2", "--in", str(report)], 0, "mtp2-verdict.schema.json")

print("failures:", failures)
sys.exit(1 if failures else 0)
