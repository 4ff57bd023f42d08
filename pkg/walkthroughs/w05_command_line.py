"""
Driving the command line tool
=============================

Every study above is also reachable from the ``unruhqfi`` command. Here the
entry point is called in-process; from a shell drop the ``cli.main`` wrapper.
"""

import io
import tempfile
from pathlib import Path

from unruhqfi import cli


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    print(f"$ unruhqfi {' '.join(argv)}   (exit {code})")
    print(buf.getvalue())


run("qfi", "--encoding", "single", "--n", "3", "--r", "0.5")
run("sweep", "--axis", "r", "--encoding", "dual", "--n", "1", "--r", "0:0.4:1.2")

# %%
# A cache file makes repeated sweeps free.
with tempfile.TemporaryDirectory() as tmp:
    cache = str(Path(tmp) / "cache.csv")
    run("sweep", "--axis", "n", "--encoding", "single", "--r", "0.8", "--n", "1..6", "--cache", cache)
    run("optimal-n", "--encoding", "single", "--r", "0.8,1.2", "--cache", cache)

run("selftest")
