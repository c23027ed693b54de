# %% [markdown]
# # Running experiments from JSON configs
#
# Every experiment is a JSON file; `skewdiff run` writes CSV data and a
# `manifest.json`, and exits 0 only when every verdict is PASS.

# %%
import json
import pathlib
import subprocess
import sys

here = pathlib.Path(__file__).resolve().parent
for name in ("sign_prob.json", "pde_validate.json"):
    cfg = here / "configs" / name
    out = here / "out" / cfg.stem
    proc = subprocess.run([sys.executable, "-m", "skewdiff.cli", "run", "--config", str(cfg),
                           "--out", str(out)], capture_output=True, text=True)
    print(name, "exit", proc.returncode)
    print(proc.stdout)
    print(json.loads((out / "manifest.json").read_text())["derived"])
