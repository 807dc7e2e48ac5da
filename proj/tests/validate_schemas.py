"""Run every JSON-emitting subcommand and validate its output against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

binary, root = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())
examples = root / "docs" / "examples"

failures = 0
checked = 0


def validate(schema, doc, label):
    global failures, checked
    checked += 1
    validator = jsonschema.Draft202012Validator(schemas[schema], registry=registry)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        failures += 1
        print(f"FAIL {label}: {errors[0].message} at {list(errors[0].path)}")


def cli(*args):
    out = subprocess.run([str(binary), *map(str, args)], capture_output=True, text=True)
    if out.returncode != 0:
        raise SystemExit(f"{' '.join(map(str, args))} exited {out.returncode}: {out.stderr}")
    return out.stdout


def check(schema, *args):
    validate(schema, json.loads(cli(*args)), " ".join(map(str, args[:2])))


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    for scenario in cli("generate", "--help").split("{", 1)[1].split("}", 1)[0].split(","):
        csv = tmp / f"{scenario}.csv"
        cli("generate", scenario, "--n", 300, "--seed", 1, "--out", csv)
        truth = json.loads((tmp / f"{scenario}.truth.json").read_text())
        validate("truth.schema.json", truth, f"truth {scenario}")
        validate("scm.schema.json", truth["scm"], f"scm {scenario}")
        validate("graph.schema.json", truth["graph"], f"graph {scenario}")
    conf, coll, anm = tmp / "confounded-linear.csv", tmp / "collider.csv", tmp / "anm-nonlinear.csv"
    (tmp / "frontdoor.scm.json").write_text(json.dumps(json.loads((tmp / "frontdoor.truth.json").read_text())["scm"]))

    for f in ["chain.json", "collider.json", "three_covariates.json"]:
        validate("graph.schema.json", json.loads((examples / f).read_text()), f)
    validate("scm.schema.json", json.loads((examples / "linear_pair.json").read_text()), "linear_pair.json")
    validate("cgm.schema.json", json.loads((examples / "rain_wet.cgm.json").read_text()), "rain_wet.cgm.json")

    check("dsep.schema.json", "dsep", examples / "chain.json", "X", "Z", "--given", "Y")
    check("adjust.schema.json", "adjust", examples / "three_covariates.json", "T", "Y")
    check("adjust.schema.json", "adjust", examples / "three_covariates.json", "T", "Y", "--check", "X1,X3")
    check("count.schema.json", "count-dags", 6)
    check("intervene.schema.json", "intervene", examples / "linear_pair.json", "--do", "X=1", "--target", "Y",
          "--n", 100, "--seed", 1)
    check("scm.schema.json", "intervene", tmp / "frontdoor.scm.json", "--do", "T=1", "--seed", 1)
    check("counterfactual.schema.json", "counterfactual", examples / "linear_pair.json", "--evidence", "X=2",
          "Y=6.5", "--do", "X=1", "--target", "Y")

    for method in ["pc", "sgs", "score"]:
        check("discovery.schema.json", "discover", coll, "--method", method, "--seed", 1)
    check("discovery.schema.json", "discover", coll, "--method", "score", "--search", "greedy", "--seed", 1)
    check("discovery.schema.json", "discover", anm, "--method", "anm", "--x", "X", "--y", "Y", "--seed", 1)

    for method in ["rct", "regression", "matching", "stratified", "ipw"]:
        extra = [] if method == "rct" else ["--z", "Z"]
        check("estimate.schema.json", "estimate", conf, "--method", method, "--y", "Y", "--t", "T", *extra)
    check("estimate.schema.json", "estimate", tmp / "frontdoor.csv", "--method", "front-door", "--y", "Y", "--t",
          "T", "--mediator", "M")
    check("estimate.schema.json", "estimate", tmp / "iv-linear.csv", "--method", "2sls", "--y", "Y", "--t", "T",
          "--instrument", "I")
    check("estimate.schema.json", "estimate", tmp / "rdd.csv", "--method", "rdd", "--y", "Y", "--score", "S",
          "--cutoff", 0, "--epsilon", 0.3)

    check("ci.schema.json", "test-ci", coll, "X", "Z", "--given", "Y", "--seed", 1)
    check("ci.schema.json", "test-ci", coll, "X", "Z", "--method", "kernel-residual", "--perms", 19, "--seed", 1)
    check("hsic.schema.json", "hsic", coll, "--x", "X", "--y", "Y", "--perms", 19, "--seed", 1)
    check("mmd.schema.json", "mmd", coll, conf, "--columns", "Y", "--perms", 19, "--seed", 1)
    check("vc.schema.json", "vc-bound", "--r-emp", 0.1, "--vc-dim", 3, "--m", 100, "--delta", 0.1)

# schemas must also reject
for schema, doc in [
    ("estimate.schema.json", {"estimator": "rct", "diagnostics": {}, "seed": 0}),
    ("dsep.schema.json", {"a": ["X"], "b": ["Z"], "given": [], "d_separated": "yes"}),
    ("graph.schema.json", {"nodes": ["A"], "edges": [["A"]]}),
    ("scm.schema.json", {"variables": [{"name": "X", "expr": ["sqrt", "U"]}]}),
    ("count.schema.json", {"n": 3, "count": 25}),
]:
    checked += 1
    if jsonschema.Draft202012Validator(schemas[schema], registry=registry).is_valid(doc):
        failures += 1
        print(f"FAIL {schema} accepted an invalid document")

print(f"{checked - failures}/{checked} documents valid")
sys.exit(1 if failures else 0)
