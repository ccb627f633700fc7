"""Block-level JPEG compatibility forensics.

The high-traffic entry points are re-exported here; the full API lives in
the submodules (pipeline, search, forensics, scenarios, metrics, jpegio).
"""

from .codec import ColorImpl, DctImpl, compress_block, decompress_block
from .forensics import (AnalysisReport, ImagePlane, UnsolvedPolicy,
                        analyze_image, build_mask)
from .pipeline import Stage, StageKind, make_pipeline, pipeline_bound
from .quant import quant_table_from_qf
from .search import SearchConfig, Verdict, find_antecedent

__all__ = [
    "AnalysisReport",
    "ColorImpl",
    "DctImpl",
    "ImagePlane",
    "SearchConfig",
    "Stage",
    "StageKind",
    "UnsolvedPolicy",
    "Verdict",
    "analyze_image",
    "build_mask",
    "compress_block",
    "decompress_block",
    "find_antecedent",
    "make_pipeline",
    "pipeline_bound",
    "quant_table_from_qf",
]
