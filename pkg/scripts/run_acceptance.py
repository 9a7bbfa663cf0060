"""Drive the CLI through a fixed battery of commands and collect the artifacts.

Usage: python3 scripts/run_acceptance.py OUTDIR [--seed N]

Every command writes its JSON or CSV into OUTDIR; a manifest records the exit
codes. Two runs with the same seed must produce byte-identical directories.
"""
import argparse
import os
import subprocess
import sys

DATA = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def battery(seed):
    d = lambda name: os.path.join(DATA, name)
    s = ["--seed", str(seed)]
    return [
        ("classify_exA3", ["classify", "--poly", d("exA3.json"), "--a", "1,1,1", "--x", "1,1,-1", "--k", "2"]),
        ("garding_lightcone", ["check", "garding", "--poly", d("lightcone.json"), "--a", "1,0,0", "--b", "2,1,0"]),
        ("curves_lightcone", ["curves", "--poly", d("lightcone.json"), "--a", "1,0,0", "--b", "2,1,0",
                              "--x", "0,0,1", "--format", "csv"]),
        ("spectrum_det3", ["spectrum", "--poly", d("det3.json"), "--x", "1,2,0,3,1,-1"]),
        ("eval_det2", ["eval", "--poly", d("det2.json"), "--x", "1,2,3"]),
        ("hyperbolic_complex", ["check", "hyperbolic", "--model", d("model_det_complex_2.json")] + s),
        ("dg_lagrangian", ["check", "dg-positivity", "--model", d("model_lagrangian_2.json")] + s),
        ("dg_isotropic", ["check", "dg-positivity", "--model", d("model_isotropic_2.json")] + s),
        ("descartes_det3", ["check", "descartes", "--poly", d("det3.json"), "--samples", "500"] + s),
        ("kfold_product", ["construct", "--poly", d("product3.json"), "--kind", "kfold", "--k", "2",
                           "--x", "1,2,3"] + s),
        ("capacity_det3", ["capacity", "--poly", d("det3.json"), "--b", "1,0,0,1,0,1", "--b", "2,0.1,0,1,0,3",
                           "--b", "1,0,0,2,0,1", "--grid-oracle"] + s),
        ("chain_det2", ["check", "chain", "--poly", d("det2.json"), "--b", "2,0.5,1", "--b", "1,0,3"] + s),
        ("yuan_below", ["check", "convexity", "--samples", "2000", "--set",
                        '{"variant": "special_lagrangian", "m": 3, "params": {"c": 1.3707963267948966}}'] + s),
        ("duality_branch", ["check", "duality", "--samples", "2000", "--set",
                            '{"variant": "branch", "m": 3, "params": {"k": 2}}'] + s),
        ("solve_ma", ["solve", "--model", "det_real", "--n", "2", "--branch", "1", "--domain", "disk",
                      "--radius", "1", "--grid", "33", "--data", "x^2", "--exact", "x^2"]),
    ]


def run(outdir, seed=0):
    os.makedirs(outdir, exist_ok=True)
    codes = []
    for name, argv in battery(seed):
        ext = "csv" if "csv" in argv else "json"
        extra = ["--out", os.path.join(outdir, f"{name}.{ext}")]
        if argv[0] == "solve":
            extra = ["--out", os.path.join(outdir, f"{name}.csv"),
                     "--report", os.path.join(outdir, f"{name}.json"),
                     "--history", os.path.join(outdir, f"{name}_history.csv")]
        proc = subprocess.run([sys.executable, "-m", "garding", *argv, *extra], capture_output=True, text=True)
        codes.append(f"{name},{proc.returncode}")
        if proc.returncode == 2:
            sys.stderr.write(f"{name}: {proc.stderr}")
    with open(os.path.join(outdir, "manifest.csv"), "w") as fh:
        fh.write("command,exit\n" + "\n".join(codes) + "\n")
    return codes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for line in run(args.outdir, args.seed):
        print(line)


if __name__ == "__main__":
    main()
