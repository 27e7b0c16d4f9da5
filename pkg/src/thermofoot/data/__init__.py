from .angiosomes import AngiosomeLayout, region_masks, split_angiosomes
from .io import load_dataset, read_grid, save_dataset, write_grid
from .synth import CONTROL_MEANS, synthesize_dataset
from .thermal import (ANGIOSOMES, BACKGROUND, FOOT_SIDES, AngiosomeSet, FootRecord,
                      SubjectRecord, ThermalMap)

__all__ = [
    "ANGIOSOMES", "BACKGROUND", "CONTROL_MEANS", "FOOT_SIDES", "AngiosomeLayout",
    "AngiosomeSet", "FootRecord", "SubjectRecord", "ThermalMap", "load_dataset",
    "read_grid", "region_masks", "save_dataset", "split_angiosomes",
    "synthesize_dataset", "write_grid",
]
