"""
Sequences, datasets, file formats and splits
"""
from .dataset import Dataset, Sequence
from .io import Split, load_dataset, mccv_split, read_sequence_file, resample, save_dataset, write_sequence_file

__all__ = [
    "Sequence", "Dataset", "Split", "load_dataset", "save_dataset", "resample", "mccv_split",
    "read_sequence_file", "write_sequence_file",
]
