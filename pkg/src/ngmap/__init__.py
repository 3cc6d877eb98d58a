"""n-dimensional generalized maps: simplification and integer homology."""

from .core import (
    Cell,
    CellCatalog,
    DomainError,
    GMap,
    InputError,
    InvalidGMap,
    ValidationReport,
    gmap_from_pairs,
    incident,
)
from .homology import (
    BoundaryNotNilpotent,
    ChainComplex,
    GeneratorChain,
    HomologyResult,
    build_chain_complex,
    homology,
    homology_of_map,
    project_generators,
    transport_chain,
)
from .io import (
    MeshMap,
    ResultReport,
    gmap_from_voxels,
    load_off,
    load_voxels,
    read_gmap_table,
    write_gmap_table,
    write_report,
)
from .orientation import (
    NonOrientableCell,
    SignedGMap,
    SubclassReport,
    assign_signs,
    boundary_partition,
    check_subclass,
    is_orientable_cell,
    signed_incidence,
)
from .simplify import (
    LogMismatch,
    NonTerminatingWalk,
    NotContractible,
    NotRemovable,
    OperationLog,
    OperationRecord,
    PipelineError,
    closure,
    coclosure,
    contract_cell,
    contract_i_cells,
    fingerprint,
    is_codangling,
    is_collapsible,
    is_contractible,
    is_dangling,
    is_removable,
    cells_preserved,
    remove_cell,
    remove_i_cells,
    replay,
    replay_prefix,
    simplify,
)
from .smith import smith_normal_form, sparse_invariant_factors

__version__ = "0.1.0"

__all__ = [
    "BoundaryNotNilpotent",
    "Cell",
    "CellCatalog",
    "ChainComplex",
    "DomainError",
    "GMap",
    "GeneratorChain",
    "HomologyResult",
    "InputError",
    "InvalidGMap",
    "LogMismatch",
    "MeshMap",
    "NonOrientableCell",
    "NonTerminatingWalk",
    "NotContractible",
    "NotRemovable",
    "OperationLog",
    "OperationRecord",
    "PipelineError",
    "ResultReport",
    "SignedGMap",
    "SubclassReport",
    "ValidationReport",
    "assign_signs",
    "boundary_partition",
    "build_chain_complex",
    "cells_preserved",
    "check_subclass",
    "closure",
    "coclosure",
    "contract_cell",
    "contract_i_cells",
    "fingerprint",
    "gmap_from_pairs",
    "gmap_from_voxels",
    "homology",
    "homology_of_map",
    "incident",
    "is_codangling",
    "is_collapsible",
    "is_contractible",
    "is_dangling",
    "is_orientable_cell",
    "is_removable",
    "load_off",
    "load_voxels",
    "project_generators",
    "read_gmap_table",
    "remove_cell",
    "remove_i_cells",
    "replay",
    "replay_prefix",
    "signed_incidence",
    "simplify",
    "smith_normal_form",
    "sparse_invariant_factors",
    "transport_chain",
    "write_gmap_table",
    "write_report",
]
