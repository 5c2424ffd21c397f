"""
Command-line walk-through
=========================

Writes a sample to a temporary file and drives the `tailtrunc` subcommands
on it, the same way a shell session would.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

from tailtrunc import ParetoModel, TruncatedModel, sample
from tailtrunc.ingestion import save

tmp = Path(tempfile.mkdtemp())
data = tmp / "losses.txt"
save(sample(TruncatedModel.at_level(ParetoModel(1.0), 0.95), 300, seed=5), data)


def tailtrunc(*args):
    cmd = [sys.executable, "-m", "tailtrunc", *map(str, args)]
    print("$ tailtrunc " + " ".join(map(str, args)))
    out = subprocess.run(cmd, capture_output=True, text=True)
    lines = (out.stdout + out.stderr).splitlines()
    print("\n".join(lines[:8] + ["..."] * (len(lines) > 8)))
    print(f"[exit {out.returncode}]\n")


tailtrunc("fit", "--input", data, "--k", "20:100:20", "--p", "0.001")
tailtrunc("test", "--input", data, "--k", "50,100,150")
tailtrunc("endpoint", "--input", data, "--k", "100", "--format", "json")
tailtrunc("qq", "--input", data, "--kind", "tpa", "--stride", "5")

cfg = tmp / "sim.cfg"
cfg.write_text("model = trunc(pareto(alpha=2), Tq=0.9)\nn = 400\nruns = 20\nk_grid = 50:350:100\n"
               "estimators = alpha_trunc, test_ta, test_tb\n")
tailtrunc("simulate", "--config", cfg, "--seed", "1")

# a bad k range is a usage error: exit code 2
tailtrunc("fit", "--input", data, "--k", "0:5")
