"""Path spaces, boundary path spaces and regulated limits of directed graphs."""

from fibrewise.graph_paths.graph import (
    BundleEdge,
    Edge,
    Graph,
    InfinitePath,
    Path,
    VertexClassification,
    classify,
    paths,
    paths_upto,
)
from fibrewise.graph_paths.limits import (
    MODES,
    CylinderSet,
    PathSequenceSpec,
    Slot,
    converges,
    cylinder_member,
    member,
    projection,
    regulating_set,
    stage_set,
)

__all__ = [
    "MODES", "BundleEdge", "CylinderSet", "Edge", "Graph", "InfinitePath", "Path",
    "PathSequenceSpec", "Slot", "VertexClassification", "classify", "converges",
    "cylinder_member", "member", "paths", "paths_upto", "projection",
    "regulating_set", "stage_set",
]
