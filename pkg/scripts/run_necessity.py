"""Simulate data from random profiles and check the necessary axioms.

Writes results/necessity.json. Usage: python3 scripts/run_necessity.py [--n N] [--seed S]
"""

import argparse
import json
from pathlib import Path

from onpath.harness import NECESSARY, necessity_run

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=500)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "results" / "necessity.json"))
args = ap.parse_args()

report = {}
for model in NECESSARY:
    t = necessity_run(model, args.n, args.seed)
    report[model] = t.to_json()
    print(f"{model}: {t.agree}/{t.total} satisfy {[name for name, _ in NECESSARY[model]]}, "
          f"{t.skipped} profiles redrawn")

out = Path(args.out)
out.parent.mkdir(parents=True, exist_ok=True)
out.write_text(json.dumps(report, indent=2) + "\n")
print(f"wrote {out}")
