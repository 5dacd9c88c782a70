"""Controllability conditioning analysis for battery cells and packs."""

from .aging import (
    AGED_SUFFIX,
    AgingSpec,
    BatchStats,
    SensitivityRecord,
    apply_eol,
    batch_statistics,
    canonical_target,
    normalized_sensitivity,
    randomize_second_life,
)
from .cccv import (
    COMPLETED,
    FAULT,
    TIMED_OUT,
    CccvProtocol,
    SimResult,
    cv_current,
    euler_step,
    run_cccv,
)
from .ctrb import (
    DEFAULT_SOC_GRID,
    ConditionProfile,
    CtrbMatrix,
    TwoStateEigs,
    condition_number,
    controllability_matrix,
    drift_jacobian,
    equilibrium_ctrb,
    input_vector,
    kappa_profile,
    lie_bracket_sequence,
    rank,
    two_state_eigs,
)
from .errors import (
    CellcondError,
    CountExceedsPopulation,
    DegenerateCv,
    EmptyDesignSet,
    GenerationFailed,
    MixedGrids,
    NonFiniteBracket,
    NonpositiveTimeConstant,
    OddPopulation,
    ParseError,
    SchemaError,
    ValidationError,
)
from .exports import (
    write_batch_stats_csv,
    write_profiles_csv,
    write_scatter_csv,
    write_sensitivity_csv,
    write_summary_csv,
    write_table_csv,
    write_trajectory_csv,
)
from .model import (
    CellParameters,
    CellState,
    CellValidation,
    DynamicsEval,
    ParameterMap,
    dynamics,
    equilibrium_state,
    eval_map,
    eval_map_derivative,
    validate_cell,
)
from .packs import (
    BestDesigns,
    PackDesign,
    cell_kappa_averages,
    evaluate_designs,
    export_scatter,
    generate_partitions,
    pack_metrics,
    select_best,
)
from .population import (
    PopulationSpec,
    generate_population,
    load_population,
    save_population,
)

__version__ = "0.1.0"
