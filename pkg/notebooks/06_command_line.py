"""
Batch runs from the command line
================================

Every subcommand writes its artifacts and a manifest.json (parameters,
sha256 digests, version) into --out.  The same calls work from a shell as
``elasticc3 <subcommand> ...``.
"""

# %%
import json
import tempfile
from pathlib import Path

from elasticc3.cli import main

work = Path(tempfile.mkdtemp())
main(["simulate", "--out", str(work / "sim"), "--percentage", "0.9", "--seed", "1"])
main(["fit-aux", "--out", str(work / "aux"), "--aux", str(work / "sim" / "aux.mtx"),
      "--K", "3", "--seed", "1"])
main(["transfer", "--out", str(work / "tr"), "--target", str(work / "sim" / "target.mtx"),
      "--knowledge", str(work / "aux" / "knowledge.json"), "--alpha", "0.9", "--beta", "0.04",
      "--K", "3", "--labels", str(work / "sim" / "target_labels.txt"), "--seed", "1"])
print(sorted(p.name for p in (work / "tr").iterdir()))
print(json.dumps(json.loads((work / "tr" / "report.json").read_text())["metrics"], indent=1))

# %%
# Plot-ready trace: iteration and objective, tab separated.
print((work / "tr" / "target_trace.tsv").read_text())

# %%
# Flags can come from a flat key=value file; explicit flags win.
cfg = work / "run.cfg"
cfg.write_text("simulate=true\nalpha=0.5\nbeta=0.01\nrestarts=4\n")
code = main(["pipeline", "--config", str(cfg), "--out", str(work / "pipe"), "--alpha", "0.9"])
print("exit", code, json.loads((work / "pipe" / "manifest.json").read_text())["parameters"]["alpha"])
