"""Write the four illustration datasets to figures/figN.json."""

from pathlib import Path

from onpath.core import dumps_dataset
from onpath.figures import figure

root = Path(__file__).resolve().parent.parent / "figures"
root.mkdir(exist_ok=True)
for n in range(1, 5):
    (root / f"fig{n}.json").write_text(dumps_dataset(figure(n)) + "\n")
    print(f"wrote figures/fig{n}.json")
