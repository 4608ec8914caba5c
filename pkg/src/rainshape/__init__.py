"""Shape analysis of rain regions in gridded precipitation snapshots.

Regions under rainfall become star-hull radial functions about their convex
hull centroid, are mapped to an approximately Gaussian scale, and are then
summarized by size-weighted functional PCA or truncated Fourier models.
"""

from .fourier import FourierModel, fit_fourier, modal_axiality, select_order
from .fpca import EigenSystem, FunctionalSample, fit_eigensystem, select_num_components
from .geometry import Polygon
from .ingest import PassRecord, Snapshot, parse_records, read_snapshots
from .normalize import NormalizingMap
from .pipeline import PipelineConfig, extract_contours, fit_fpca
from .regions import Region, extract_regions
from .starhull import AngularGrid, RadialFunction, radial_function
from .survival import SizeObservation, kaplan_meier_weights
from .synth import SynthSpec, generate_dataset

__version__ = "0.1.0"

__all__ = [
    "AngularGrid", "EigenSystem", "FourierModel", "FunctionalSample", "NormalizingMap", "PassRecord",
    "PipelineConfig", "Polygon", "RadialFunction", "Region", "SizeObservation", "Snapshot", "SynthSpec",
    "extract_contours", "extract_regions", "fit_eigensystem", "fit_fourier", "fit_fpca", "generate_dataset",
    "kaplan_meier_weights", "modal_axiality", "parse_records", "radial_function", "read_snapshots",
    "select_num_components", "select_order",
]
