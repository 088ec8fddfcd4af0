"""Run the quasi-hyperbolic reproductions and write results/qhd_repro.json
and results/appendixA_K50.json."""

import json
from pathlib import Path

from onpath.qhd.repro import gen_appendixA, repro_theorem1, repro_theorem2

root = Path(__file__).resolve().parent.parent / "results"
root.mkdir(exist_ok=True)
reports = [repro_theorem1(), repro_theorem2()]
data, appendix = gen_appendixA(50)
reports.append(appendix)
for rep in reports:
    print(f"{rep.name}: {'pass' if rep.passed else 'FAIL ' + ', '.join(rep.failed())}")
    for flag in rep.flags:
        print(f"  flag: {flag}")
(root / "qhd_repro.json").write_text(json.dumps([r.to_json() for r in reports], indent=2) + "\n")
(root / "appendixA_K50.json").write_text(json.dumps(data, indent=2) + "\n")
print("wrote results/qhd_repro.json and results/appendixA_K50.json")
