"""Cut Scott-Vogelius Stokes solver on Clough-Tocher macro-meshes."""

from ._cutsv import (
    AssembledSystem,
    BackgroundMesh,
    Box,
    Circle,
    CtMesh,
    CutTopology,
    ErrorReport,
    InfSupEstimate,
    ManufacturedSolution,
    MethodParams,
    RuleSet,
    SaddleSolution,
    StudyConfig,
    StudyResult,
    StudyRow,
    SvSpace,
    assemble_system,
    build_rules,
    build_space,
    build_type1_mesh,
    classify,
    clough_tocher_refine,
    compute_eoc,
    compute_errors,
    estimate_infsup,
    load_config,
    make_vortex_solution,
    parse_config,
    run_study,
    solve,
)

__all__ = [
    "AssembledSystem",
    "BackgroundMesh",
    "Box",
    "Circle",
    "CtMesh",
    "CutTopology",
    "ErrorReport",
    "InfSupEstimate",
    "ManufacturedSolution",
    "MethodParams",
    "RuleSet",
    "SaddleSolution",
    "StudyConfig",
    "StudyResult",
    "StudyRow",
    "SvSpace",
    "assemble_system",
    "build_rules",
    "build_space",
    "build_type1_mesh",
    "classify",
    "clough_tocher_refine",
    "compute_eoc",
    "compute_errors",
    "estimate_infsup",
    "load_config",
    "make_vortex_solution",
    "parse_config",
    "run_study",
    "solve",
]
