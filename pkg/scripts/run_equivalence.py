"""Compare every characterization with the exact oracle on random small datasets.

Writes results/equivalence.json. Usage: python3 scripts/run_equivalence.py [--n N] [--seed S]
"""

import argparse
import json
import time
from pathlib import Path

from onpath.harness import SamplerConfig, equivalence_run, linear_nash_divergence

FAMILIES = {
    "two-period-distinct": SamplerConfig(distinct_x1=True),
    "two-period": SamplerConfig(),
    "multi-period-distinct": SamplerConfig(periods=3, max_size=2, max_K=2, distinct_x1=True),
    "multi-period": SamplerConfig(periods=3, max_size=2, max_K=2),
}

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=2000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "results" / "equivalence.json"))
args = ap.parse_args()

report = {"n": args.n, "seed": args.seed, "families": {}}
for family, sampler in FAMILIES.items():
    t0 = time.perf_counter()
    tallies = equivalence_run(family, sampler, args.n, args.seed)
    report["families"][family] = {m: t.to_json() for m, t in tallies.items()}
    line = ", ".join(f"{m} {t.agree}/{t.total}" for m, t in tallies.items())
    print(f"{family}: {line} ({time.perf_counter() - t0:.1f}s)")
hits = linear_nash_divergence(SamplerConfig(), 500, args.seed)
report["linear_nash_divergence"] = {"n": 500, "instances": hits}
print(f"linear-order naive-Nash divergences: {len(hits)}/500")

out = Path(args.out)
out.parent.mkdir(parents=True, exist_ok=True)
out.write_text(json.dumps(report, indent=2) + "\n")
print(f"wrote {out}")
