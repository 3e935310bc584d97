"""Figure definitions and input discovery.

Inputs are located purely by the simulator CLI's file naming convention:
a plain run writes <name>.csv, a gain sweep writes <name>.<gain>_<tag>.csv
where the tag is the value formatted with '.' -> 'p' and '-' -> 'm'.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingFile


@dataclass(frozen=True)
class Panel:
    channel: str          # response column to draw
    reference: str        # reference column, drawn as a dashed step line
    ylabel: str


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    title: str
    panels: tuple[Panel, ...]
    curves: tuple[tuple[str, Path], ...]  # (legend label, csv path)
    sweep_gain: str | None = None


_VOLT = "V"
_PANELS = {
    "x4": Panel(channel="x4", reference="x4star", ylabel=f"output voltage x4 [{_VOLT}]"),
    "x2": Panel(channel="x2", reference="x2star", ylabel=f"bus voltage x2 [{_VOLT}]"),
    "x5": Panel(channel="x5", reference="", ylabel=f"storage voltage x5 [{_VOLT}]"),
}

# figure id -> (sweep gain or None, panel layout, title)
_LAYOUTS = {
    "fig5a": ("kappa1", ("x4",), "Output-voltage step response across kappa1"),
    "fig5b": ("kappa2", ("x4",), "Output-voltage step response across kappa2"),
    "fig5c": ("kappa3", ("x4",), "Output-voltage step response across kappa3"),
    "fig6a": ("kappa4", ("x2",), "Bus-voltage step response across kappa4"),
    "fig6b": ("kappa5", ("x2",), "Bus-voltage step response across kappa5"),
    "fig7": (None, ("x2",), "Bus-voltage regulation under stepped load"),
    "fig8": (None, ("x4", "x2"), "Voltage regulation under reference and load steps"),
    "fig9": (None, ("x5",), "Storage voltage during charge/discharge cycling"),
}

FIGURE_IDS = tuple(_LAYOUTS)


def _tag_value(tag: str) -> float:
    return float(tag.replace("p", ".").replace("m", "-"))


def discover(figure_id: str, in_dir: Path) -> FigureSpec:
    """Build the figure's input list from the files present in in_dir."""
    if figure_id not in _LAYOUTS:
        raise ValueError(f"unknown figure id '{figure_id}'; "
                         f"expected one of {', '.join(FIGURE_IDS)}")
    gain, panel_names, title = _LAYOUTS[figure_id]
    in_dir = Path(in_dir)
    curves: list[tuple[str, Path]] = []
    if gain is not None:
        tagged = sorted(in_dir.glob(f"{figure_id}.{gain}_*.csv"))
        for path in tagged:
            tag = path.stem[len(figure_id) + 1 + len(gain) + 1:]
            curves.append((f"{gain} = {_tag_value(tag):g}", path))
        curves.sort(key=lambda c: _tag_value(c[1].stem.rsplit("_", 1)[1]))
    if not curves:
        plain = in_dir / f"{figure_id}.csv"
        if plain.exists():
            curves.append((figure_id, plain))
    if not curves:
        raise MissingFile(
            f"no CSVs for {figure_id} in {in_dir} (looked for "
            f"{figure_id}.csv"
            + (f" and {figure_id}.{gain}_*.csv" if gain else "") + ")")
    return FigureSpec(
        figure_id=figure_id,
        title=title,
        panels=tuple(_PANELS[n] for n in panel_names),
        curves=tuple(curves),
        sweep_gain=gain,
    )
