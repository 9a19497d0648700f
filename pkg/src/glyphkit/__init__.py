"""Geometry toolkit for vector glyph outlines.

Parsing of SVG path data into a four-point command model, ground-truth
continuity/alignment labeling, deterministic geometric refinement with a
differentiable straight-through variant, training-loss reference
implementations, and rasterization-based evaluation metrics.
"""

from .autodiff import (
    DiffValue,
    GradcheckReport,
    SteTieError,
    Tape,
    backward,
    gradcheck,
    ste_select,
)
from .diffrefine import DiffCubic, DiffLine, diff_refine_junction, diff_snap_line
from .geometry import (
    Cubic,
    JunctionTangents,
    Line,
    Segment,
    bezier_point,
    junction_tangents,
    sample_segment,
    segment_of,
)
from .labels import (
    AlignLabel,
    ContinuityLabel,
    Thresholds,
    classify_alignment,
    classify_junction,
    enumerate_junction_sites,
    enumerate_line_sites,
    label_glyph,
)
from .losses import (
    CostMatrix,
    LossComponents,
    LossWeights,
    kl_gaussian,
    loss_alignment,
    loss_args,
    loss_aux_render,
    loss_cmd,
    loss_consistency,
    loss_continuity,
    loss_visibility,
    total_loss,
)
from .metrics import (
    accuracy_alignment,
    accuracy_continuity,
    chamfer_re,
    glyph_point_cloud,
    iou,
    l1_image,
)
from .model import (
    Command,
    CommandKind,
    EPS_JOIN,
    Glyph,
    GlyphCapacityError,
    PaddedGlyphTensor,
    Path,
    ValidationReport,
    normalize_glyph,
    pad_glyph,
    strip_padding,
    validate_glyph,
)
from .pathdata import ParseError, elevate_quadratic, parse_path_data, serialize_path_data
from .raster import RasterGrid, rasterize
from .refine import (
    RefineError,
    RefineResult,
    refine_continuity_junction,
    refine_glyph,
    snap_alignment,
)

__version__ = "0.1.0"
