"""The whole chain from the shell, driven here through `rainshape.cli.main`.

synth writes a record file, extract turns it into per-contour radial files
plus a manifest, and fpca / fourier / report analyse the manifest. Each
command writes under --out, or under $RAINSHAPE_OUT when --out is absent.
"""

import json
import sys
import tempfile
from pathlib import Path

from rainshape import SynthSpec
from rainshape.cli import main

work = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="rainshape-demo-"))
spec = work / "spec.json"
work.mkdir(parents=True, exist_ok=True)
spec.write_text(SynthSpec(n_regions=40, seed=7, censor_fraction=0.2, n_groups=2).to_json())

steps = [
    ["synth", spec, "--out", work / "synth"],
    ["extract", work / "synth" / "records.csv", "--out", work / "extract"],
    ["fpca", work / "extract" / "manifest.csv", "--out", work / "fpca", "--svg"],
    ["fourier", work / "extract" / "manifest.csv", "--out", work / "fourier", "--svg"],
    ["report", work / "extract" / "manifest.csv", "--out", work / "report"],
]
for argv in steps:
    code = main([str(a) for a in argv])
    print(f"rainshape {argv[0]:8s} -> exit {code}")

print((work / "fpca" / "variance_explained.csv").read_text())
print(json.dumps(sorted(p.name for p in (work / "fourier").iterdir())))

# Bad configuration exits with 2, unusable data with 3.
print("bad config:", main(["fpca", str(work / "extract" / "manifest.csv"), "--min-area-km2", "-1"]))
print("missing file:", main(["fpca", str(work / "nope.csv"), "--out", str(work / "x")]))
