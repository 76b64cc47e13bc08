"""
Dataset ingestion and splitting.

A manifest (JSON) lists classes and their sequence files; each sequence file
is comma-separated text, one time step per row, one feature per column, no
header. Values are resampled to the manifest's common length on load.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import ValidationError

from gpdmm.data.dataset import Dataset, Sequence
from gpdmm.exceptions import GPDMMError, LoadError, ShapeError, SplitError, UsageError
from gpdmm.models.data import Manifest, ManifestClass

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def read_sequence_file(path: Union[str, Path], feature_count: int) -> np.ndarray:
    """
    Read one comma-separated sequence file.

    Raises:
        LoadError: If the file is missing, unparsable, ragged, has the wrong
            column count or a non-finite cell
    """
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"Archivo de secuencia no encontrado: {path}")
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2, encoding="utf-8")
    except ValueError as e:
        raise LoadError(f"{path}: no se pudo interpretar el archivo ({e})") from e
    if values.shape[1] != feature_count:
        raise LoadError(f"{path}: {values.shape[1]} columnas, el manifiesto declara {feature_count}")
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = bad[0]
        raise LoadError(f"{path}: valor no finito en fila {row + 1}, columna {col + 1}")
    return values


def write_sequence_file(path: Union[str, Path], values: np.ndarray) -> Path:
    """Write values with full float precision and LF line endings"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, np.atleast_2d(values), delimiter=",", fmt=FLOAT_FORMAT)
    return path


def resample(sequence: Sequence, target_length: int) -> Sequence:
    """
    Per-feature linear interpolation over normalized time.

    Endpoints are preserved exactly; the time step is rescaled so the total
    duration is unchanged.

    Raises:
        UsageError: If target_length < 2
    """
    if target_length < 2:
        raise UsageError(f"La longitud objetivo debe ser >= 2, recibida {target_length}")
    n = sequence.length
    if n == target_length:
        return Sequence(values=sequence.values.copy(), class_label=sequence.class_label,
                        source_id=sequence.source_id, dt=sequence.dt)
    old_t = np.linspace(0.0, 1.0, n)
    new_t = np.linspace(0.0, 1.0, target_length)
    values = np.column_stack([np.interp(new_t, old_t, sequence.values[:, d]) for d in range(sequence.feature_count)])
    values[0] = sequence.values[0]
    values[-1] = sequence.values[-1]
    dt = sequence.dt * (n - 1) / (target_length - 1)
    return Sequence(values=values, class_label=sequence.class_label, source_id=sequence.source_id, dt=dt)


def read_manifest(path: Union[str, Path]) -> Manifest:
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"Manifiesto no encontrado: {path}")
    try:
        return Manifest.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(p) for p in err["loc"])
        raise LoadError(f"{path}: manifiesto inválido en '{field}': {err['msg']}") from e


def load_dataset(manifest_path: Union[str, Path]) -> Dataset:
    """
    Load, validate and resample every sequence listed in a manifest.

    Raises:
        LoadError: Missing files, parse failures, wrong column counts, non-finite cells
    """
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    root = manifest_path.parent
    sequences: List[Sequence] = []
    for entry in manifest.classes:
        for name in entry.files:
            file_path = root / name
            values = read_sequence_file(file_path, manifest.feature_count)
            try:
                seq = Sequence(values=values, class_label=entry.label, source_id=name, dt=manifest.dt)
            except GPDMMError as e:
                raise LoadError(f"{file_path}: {e}") from e
            sequences.append(resample(seq, manifest.target_length))
    dataset = Dataset(sequences=sequences, classes=[c.label for c in manifest.classes],
                      name=manifest.dataset_name, unit=manifest.unit)
    logger.info(f"📂 Dataset '{manifest.dataset_name}': {len(sequences)} secuencias, "
                f"{len(dataset.classes)} clases, D={dataset.D}, longitud={manifest.target_length}")
    return dataset


def save_dataset(dataset: Dataset, out_dir: Union[str, Path], manifest_name: str = "manifest.json") -> Path:
    """
    Write a dataset as a manifest plus one CSV per sequence.

    Raises:
        LoadError: If the directory cannot be written
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        classes = []
        for label in dataset.classes:
            files = []
            for idx in dataset.indices_of(label):
                seq = dataset.sequences[idx]
                name = f"{seq.source_id}.csv" if not seq.source_id.endswith(".csv") else seq.source_id
                write_sequence_file(out_dir / name, seq.values)
                files.append(name)
            classes.append(ManifestClass(label=label, files=files))
        length = dataset.length
        if length is None:
            raise ShapeError("Solo se pueden guardar datasets de longitud común")
        manifest = Manifest(dataset_name=dataset.name, feature_count=dataset.D, target_length=length,
                            dt=dataset.dt, unit=dataset.unit, classes=classes)
        path = out_dir / manifest_name
        path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    except OSError as e:
        raise LoadError(f"No se pudo escribir en {out_dir}: {e}") from e
    logger.info(f"💾 Dataset escrito en {out_dir} ({len(dataset.sequences)} secuencias)")
    return path


@dataclass(frozen=True)
class Split:
    """Sequence indices of one MCCV resample"""

    train: List[int]
    validation: List[int]
    test: List[int]


def mccv_split(dataset: Dataset, seed: int, n_validation_per_class: int, n_test_per_class: int) -> Split:
    """
    Random train/validation/test split with exactly one training sequence per class.

    Each class's indices are permuted with a generator seeded from ``seed``;
    the first goes to training, the next n_validation to validation and the
    next n_test to test. Classes are visited in dataset order.

    Raises:
        SplitError: If a class has fewer than 1 + n_validation + n_test sequences
    """
    if n_validation_per_class < 0 or n_test_per_class < 0:
        raise UsageError("Los tamaños de validación y prueba deben ser >= 0")
    rng = np.random.default_rng(seed)
    need = 1 + n_validation_per_class + n_test_per_class
    train, validation, test = [], [], []
    for label in dataset.classes:
        indices = dataset.indices_of(label)
        if len(indices) < need:
            raise SplitError(f"La clase '{label}' tiene {len(indices)} secuencias; se necesitan {need}")
        order = [indices[i] for i in rng.permutation(len(indices))]
        train.append(order[0])
        validation.extend(order[1:1 + n_validation_per_class])
        test.extend(order[1 + n_validation_per_class:need])
    return Split(train=train, validation=validation, test=test)
