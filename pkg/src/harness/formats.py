"""
Dataset and reconstruction file formats.

Both are UTF-8 JSON objects carrying a `format_version`. Coordinate arrays
are row-major lists of [x, y] or [x, y, z]. Floats are written with their
shortest round-trip representation.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from ..geometry import Camera, normalize_image_point
from ..sft import CorrespondenceSet, SourceNormalization
from ..storage import FileManager
from ..synthgen import EtcDataset
from ..utils.exceptions import DatasetFormatError, TopoSftError, ValidationError
from ..utils.validators import as_points

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DATASET_TYPE = 'dataset'
RECONSTRUCTION_TYPE = 'reconstruction'
TRACE_TYPE = 'trace'
MODES = ('baseline', 'refined')


def _points(data: Mapping[str, Any], key: str, dim: int, path: Optional[str],
            required: bool = True) -> Optional[np.ndarray]:
    if key not in data or data[key] is None:
        if required:
            raise DatasetFormatError(f"Missing field '{key}'", path=path, field=key)
        return None
    try:
        return as_points(data[key], dim, key)
    except ValidationError as e:
        raise DatasetFormatError(e.message, path=path, field=key)


def _check_header(data: Mapping[str, Any], kind: str, path: Optional[str]) -> None:
    version = data.get('format_version')
    if version != FORMAT_VERSION:
        raise DatasetFormatError(
            f"Unsupported format_version {version!r}; expected {FORMAT_VERSION}",
            path=path, field='format_version',
        )
    if data.get('type', kind) != kind:
        raise DatasetFormatError(f"Expected a {kind} file, found {data.get('type')!r}",
                                 path=path, field='type')


def _same_length(path: Optional[str], **arrays: Optional[np.ndarray]) -> None:
    lengths = {name: len(a) for name, a in arrays.items() if a is not None}
    if len(set(lengths.values())) > 1:
        raise DatasetFormatError(
            "Array lengths differ: " + ", ".join(f"{k}={v}" for k, v in lengths.items()),
            path=path,
        )


@dataclass
class DatasetFile:
    """
    Correspondences on disk, optionally with ground truth.

    image_targets are always held in retinal coordinates; files may store
    them in pixels when a camera is given.
    """

    sources: np.ndarray
    template_targets: np.ndarray
    image_targets: np.ndarray
    units: str = 'AU'
    camera: Optional[Camera] = None
    gt_points: Optional[np.ndarray] = None
    component_labels: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.sources)

    @property
    def has_ground_truth(self) -> bool:
        return self.gt_points is not None

    @classmethod
    def from_dataset(cls, dataset: EtcDataset) -> 'DatasetFile':
        return cls(
            sources=dataset.param_points,
            template_targets=dataset.template_points,
            image_targets=dataset.image_points,
            camera=dataset.camera,
            gt_points=dataset.gt_points,
            component_labels=dataset.component_labels,
            metadata=dataset.spec.to_dict(),
        )

    def to_correspondences(self) -> CorrespondenceSet:
        return CorrespondenceSet(self.sources, self.template_targets, self.image_targets, self.units)

    def to_dict(self) -> Dict[str, Any]:
        pixel = self.camera is not None and not self.camera.is_identity
        image = self.camera.to_pixels(self.image_targets) if pixel else self.image_targets
        data: Dict[str, Any] = {
            'format_version': FORMAT_VERSION,
            'type': DATASET_TYPE,
            'units': self.units,
            'camera': self.camera.to_dict() if self.camera is not None else None,
            'image_coordinates': 'pixel' if pixel else 'retinal',
            'sources': self.sources.tolist(),
            'template_targets': self.template_targets.tolist(),
            'image_targets': image.tolist(),
        }
        if self.gt_points is not None:
            data['gt_points'] = self.gt_points.tolist()
        if self.component_labels is not None:
            data['component_labels'] = [int(c) for c in self.component_labels]
        data['metadata'] = self.metadata
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: Optional[str] = None) -> 'DatasetFile':
        """
        Parse and validate a dataset object.

        Raises:
            DatasetFormatError: On any missing, malformed or inconsistent field
        """
        _check_header(data, DATASET_TYPE, path)
        sources = _points(data, 'sources', 2, path)
        template = _points(data, 'template_targets', 3, path)
        image = _points(data, 'image_targets', 2, path)
        gt = _points(data, 'gt_points', 3, path, required=False)
        labels = data.get('component_labels')
        try:
            labels = None if labels is None else np.asarray(labels, dtype=int).reshape(-1)
        except (TypeError, ValueError) as e:
            raise DatasetFormatError(f"Invalid component_labels: {e}", path=path,
                                     field='component_labels')
        _same_length(path, sources=sources, template_targets=template, image_targets=image,
                     gt_points=gt, component_labels=labels)

        camera = None
        try:
            if data.get('camera') is not None:
                camera = Camera.from_dict(data['camera'])
        except (KeyError, TypeError, ValueError, TopoSftError) as e:
            raise DatasetFormatError(f"Invalid camera: {e}", path=path, field='camera')

        coordinates = data.get('image_coordinates', 'retinal')
        if coordinates == 'pixel':
            if camera is None:
                raise DatasetFormatError("Pixel image targets need a camera", path=path,
                                         field='image_coordinates')
            image = normalize_image_point(camera, image)
        elif coordinates != 'retinal':
            raise DatasetFormatError(f"Unknown image_coordinates {coordinates!r}", path=path,
                                     field='image_coordinates')

        return cls(
            sources=sources,
            template_targets=template,
            image_targets=image,
            units=str(data.get('units', 'AU')),
            camera=camera,
            gt_points=gt,
            component_labels=labels,
            metadata=dict(data.get('metadata') or {}),
        )


@dataclass
class ReconstructionFile:
    """
    Reconstructed 3D points at every source, with the run that produced them.

    Attributes:
        mode: 'baseline' (initial reconstruction only) or 'refined'
        sources: Sources in the dataset's frame
        points: Final reconstructed points
        initial_points: Points of the initial reconstruction
        gt_points: Ground truth copied from the dataset, if present
        normalization: Map from dataset sources to the [-1, 1]² frame
        displacement: Control grid and displacements, refined mode only
        trace: Descent trace, refined mode only
        summary: Aggregate statistics of the run
    """

    mode: str
    sources: np.ndarray
    points: np.ndarray
    initial_points: np.ndarray
    normalization: SourceNormalization
    kernels: Dict[str, Any]
    refine: Optional[Dict[str, Any]] = None
    gt_points: Optional[np.ndarray] = None
    displacement: Optional[Dict[str, Any]] = None
    trace: Optional[Dict[str, Any]] = None
    summary: Dict[str, Any] = field(default_factory=dict)
    dataset: Optional[str] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_baseline(self) -> bool:
        return self.mode == 'baseline'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'format_version': FORMAT_VERSION,
            'type': RECONSTRUCTION_TYPE,
            'mode': self.mode,
            'dataset': self.dataset,
            'kernels': self.kernels,
            'refine': self.refine,
            'normalization': self.normalization.to_dict(),
            'sources': self.sources.tolist(),
            'points': self.points.tolist(),
            'initial_points': self.initial_points.tolist(),
            'gt_points': None if self.gt_points is None else self.gt_points.tolist(),
            'displacement': self.displacement,
            'trace': self.trace,
            'summary': self.summary,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], path: Optional[str] = None) -> 'ReconstructionFile':
        """
        Parse and validate a reconstruction object.

        Raises:
            DatasetFormatError: On any missing, malformed or inconsistent field
        """
        _check_header(data, RECONSTRUCTION_TYPE, path)
        mode = data.get('mode')
        if mode not in MODES:
            raise DatasetFormatError(f"Unknown mode {mode!r}", path=path, field='mode')
        sources = _points(data, 'sources', 2, path)
        points = _points(data, 'points', 3, path)
        initial = _points(data, 'initial_points', 3, path)
        gt = _points(data, 'gt_points', 3, path, required=False)
        _same_length(path, sources=sources, points=points, initial_points=initial, gt_points=gt)
        try:
            normalization = SourceNormalization.from_dict(data['normalization'])
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetFormatError(f"Invalid normalization: {e}", path=path, field='normalization')
        return cls(
            mode=mode,
            sources=sources,
            points=points,
            initial_points=initial,
            normalization=normalization,
            kernels=dict(data.get('kernels') or {}),
            refine=data.get('refine'),
            gt_points=gt,
            displacement=data.get('displacement'),
            trace=data.get('trace'),
            summary=dict(data.get('summary') or {}),
            dataset=data.get('dataset'),
        )


def save_dataset(dataset: DatasetFile, path: Union[str, Path], files: FileManager) -> Path:
    path = files.save_json(path, dataset.to_dict())
    logger.info(f"Wrote dataset with {len(dataset)} points to {path}")
    return path


def load_dataset(path: Union[str, Path], files: Optional[FileManager] = None) -> DatasetFile:
    files = files or FileManager()
    dataset = DatasetFile.from_dict(files.load_json(path), str(path))
    logger.debug(f"Loaded dataset {path} ({len(dataset)} points)")
    return dataset


def save_reconstruction(recon: ReconstructionFile, path: Union[str, Path],
                        files: FileManager) -> Path:
    path = files.save_json(path, recon.to_dict())
    logger.info(f"Wrote {recon.mode} reconstruction of {len(recon)} points to {path}")
    return path


def load_reconstruction(path: Union[str, Path],
                        files: Optional[FileManager] = None) -> ReconstructionFile:
    files = files or FileManager()
    return ReconstructionFile.from_dict(files.load_json(path), str(path))


def trace_path_for(path: Union[str, Path]) -> Path:
    """Default trace file next to a reconstruction file: out.json -> out.trace.json."""
    path = Path(path)
    return path.with_name(f"{path.stem}.trace{path.suffix or '.json'}")


def save_trace(trace: Dict[str, Any], path: Union[str, Path], files: FileManager) -> Path:
    return files.save_json(path, {'format_version': FORMAT_VERSION, 'type': TRACE_TYPE, **trace})
