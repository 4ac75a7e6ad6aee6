from enum import Enum


class DispositionKind(str, Enum):
    """Geometric kernel dispositions (center point + polyhedron vertices)"""
    TETRAHEDRON = "tetra"
    OCTAHEDRON = "octa"
    ICOSAHEDRON = "icosa"


class InteractionOrder(str, Enum):
    """Order of point interaction inside a point operator"""
    FIRST = "first"
    SECOND = "second"


class Stride(str, Enum):
    """Resolution change performed by the first operator of a stage"""
    ONE = "1"
    TWO = "2"
    UP2 = "up2"


class Facet(str, Enum):
    """Searchable facets of a stage gene"""
    ORDER = "order"
    KERNEL = "kernel"
    DEPTH = "depth"
    EXPANSION = "expansion"
    WIDTH = "width"


class MutationAction(str, Enum):
    """Single-mutation actions; WIDTH_OR_EXPANSION resamples one of the two"""
    KERNEL = "kernel"
    ORDER = "order"
    WIDTH_OR_EXPANSION = "width_or_expansion"
    DEPTH = "depth"


class PredictorMode(str, Enum):
    """Available performance predictor variants"""
    DENSE_SPARSE = "dense_sparse"
    DENSE_ONLY = "dense_only"
    SPARSE_ONLY = "sparse_only"


class SearchMode(str, Enum):
    """Available architecture search drivers"""
    EVOLUTION = "evolution"
    RANDOM = "random"


class SearchEvent(str, Enum):
    INIT = "init"
    CHILD = "child"


class CloudFormat(str, Enum):
    ASCII_XYZ = "ascii_xyz"
    BINARY_F32 = "binary_f32"


KERNEL_POINT_COUNTS = {
    DispositionKind.TETRAHEDRON: 5,
    DispositionKind.OCTAHEDRON: 7,
    DispositionKind.ICOSAHEDRON: 13,
}

ALL_KERNELS = [
    DispositionKind.TETRAHEDRON,
    DispositionKind.OCTAHEDRON,
    DispositionKind.ICOSAHEDRON,
]

FIRST_ONLY = [InteractionOrder.FIRST]
BOTH_ORDERS = [InteractionOrder.FIRST, InteractionOrder.SECOND]

# Joint interaction-dimension search space, one entry per stage.
# Stages 1-7 form the backbone encoder, 8-11 the segmentation head.
STAGE_CONFIGS = {
    1: {"hierarchy": "backbone", "stride": Stride.ONE, "orders": FIRST_ONLY,
        "kernels": ALL_KERNELS, "depths": [1], "expansions": [1.0], "widths": [16]},
    2: {"hierarchy": "backbone", "stride": Stride.TWO, "orders": FIRST_ONLY,
        "kernels": ALL_KERNELS, "depths": [2, 3], "expansions": [2.0, 3.0, 4.0], "widths": [16, 24]},
    3: {"hierarchy": "backbone", "stride": Stride.TWO, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [2, 3, 4], "expansions": [2.0, 3.0, 4.0], "widths": [24, 32]},
    4: {"hierarchy": "backbone", "stride": Stride.TWO, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [3, 4, 5], "expansions": [2.0, 3.0, 4.0], "widths": [24, 32, 40]},
    5: {"hierarchy": "backbone", "stride": Stride.ONE, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [2, 3, 4], "expansions": [2.0, 3.0, 4.0], "widths": [40, 56, 72]},
    6: {"hierarchy": "backbone", "stride": Stride.TWO, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [3, 4, 5], "expansions": [2.0, 3.0, 4.0], "widths": [64, 80, 96]},
    7: {"hierarchy": "backbone", "stride": Stride.ONE, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [1], "expansions": [2.0, 3.0, 4.0], "widths": [160]},
    8: {"hierarchy": "segmentation_head", "stride": Stride.UP2, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [1], "expansions": [2.0, 3.0], "widths": [64, 80, 96]},
    9: {"hierarchy": "segmentation_head", "stride": Stride.UP2, "orders": BOTH_ORDERS,
        "kernels": ALL_KERNELS, "depths": [1], "expansions": [2.0, 3.0], "widths": [40, 56, 72]},
    10: {"hierarchy": "segmentation_head", "stride": Stride.UP2, "orders": BOTH_ORDERS,
         "kernels": ALL_KERNELS, "depths": [1], "expansions": [2.0, 3.0], "widths": [24, 32, 40]},
    11: {"hierarchy": "segmentation_head", "stride": Stride.UP2, "orders": FIRST_ONLY,
         "kernels": ALL_KERNELS, "depths": [1], "expansions": [2.0, 3.0], "widths": [16, 24]},
}

NUM_STAGES = len(STAGE_CONFIGS)

# Hand-crafted first-order model (MobileNet-V2 layer organization, Octahedron everywhere)
HAND_CRAFTED_DEPTHS = [1, 2, 3, 4, 3, 3, 1, 1, 1, 1, 1]
HAND_CRAFTED_WIDTHS = [16, 24, 32, 64, 96, 160, 320, 160, 96, 64, 32]
HAND_CRAFTED_EXPANSIONS = [1.0] + [3.0] * 10

# Dense features per stage, in encoding order
DENSE_FACETS = [Facet.DEPTH, Facet.WIDTH, Facet.EXPANSION]
# Sparse tokens per stage, in encoding order
SPARSE_FACETS = [Facet.KERNEL, Facet.ORDER]

GENOTYPE_SCHEMA_VERSION = 1

# Resolution level of every stage's output (level L has grid cell base_cell * 2**L)
STAGE_LEVELS = [0, 1, 2, 3, 3, 4, 4, 3, 2, 1, 0]
# Decoder stage -> encoder stage whose output is concatenated as the skip connection
DECODER_SKIPS = {8: 5, 9: 3, 10: 2, 11: 1}

# Dense feature tower hidden widths; the tower output width is the embedding dim
DENSE_TOWER_WIDTHS = [64, 128]

# Predictor variants: which inputs they read and their regression head widths
PREDICTOR_CONFIGS = {
    PredictorMode.DENSE_SPARSE: {"uses_dense": True, "uses_sparse": True, "head_widths": [256, 256]},
    PredictorMode.DENSE_ONLY: {"uses_dense": True, "uses_sparse": False, "head_widths": [256, 128]},
    PredictorMode.SPARSE_ONLY: {"uses_dense": False, "uses_sparse": True, "head_widths": [256, 128]},
}
