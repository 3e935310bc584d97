"""Acceptance: render the full catalog from real simulator output.

Exercises the renderer strictly through the external interfaces: the
simulator is driven via its CLI and the renderer consumes the files it
wrote, exactly as a user would.
"""

import struct
import subprocess
import sys

import pytest

from plotgen.cli import main
from plotgen.csvio import CSV_HEADER
from plotgen.figures import FIGURE_IDS

# reduced sweeps keep the runtime reasonable while still producing every
# figure from a genuine simulator run
_SWEEPS = {
    "fig5a": "5,10",
    "fig5b": "1,10",
    "fig5c": "100,500",
    "fig6a": "1,5",
    "fig6b": "1.8,3.6",
}
_RUNS = ("fig7", "fig8", "fig9")


def _simulate(cmd):
    proc = subprocess.run([sys.executable, "-m", "converter_sim.cli"] + cmd,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def primary_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim_out")
    for name, values in _SWEEPS.items():
        _simulate(["sweep", name, "--values", values, "--jobs", "2",
                   "--out", str(out)])
    for name in _RUNS:
        _simulate(["run", name, "--out", str(out)])
    return out


class TestSecondaryAcceptance:
    def test_renders_all_catalog_figures(self, primary_outputs, tmp_path):
        out = tmp_path / "figs"
        failures = []
        for figure_id in FIGURE_IDS:
            code = main([figure_id, "--in", str(primary_outputs),
                         "--out", str(out)])
            png = out / f"{figure_id}.png"
            if code != 0 or not png.exists():
                failures.append(figure_id)
                continue
            w, h = struct.unpack(">II", png.read_bytes()[16:24])
            if (w, h) != (1200, 800):
                failures.append(figure_id)
        ok = not failures
        print(f"[{'PASS' if ok else 'FAIL'}] renderer produces all eight "
              f"catalog figures from simulator output"
              + (f"  (failed: {failures})" if failures else ""))
        assert ok

    def test_refuses_permuted_header(self, primary_outputs, tmp_path):
        source = primary_outputs / "fig8.csv"
        broken_dir = tmp_path / "broken"
        broken_dir.mkdir()
        lines = source.read_text().splitlines()
        head = lines[0].split(",")
        assert ",".join(head) == CSV_HEADER
        head[3], head[4] = head[4], head[3]
        (broken_dir / "fig8.csv").write_text(
            "\n".join([",".join(head)] + lines[1:]))
        code = main(["fig8", "--in", str(broken_dir),
                     "--out", str(tmp_path / "o")])
        ok = code == 3
        print(f"[{'PASS' if ok else 'FAIL'}] renderer refuses a CSV with a "
              f"permuted header")
        assert ok
