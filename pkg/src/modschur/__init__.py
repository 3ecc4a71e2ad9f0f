"""Computational tools for Schur, Rado and modular Schur numbers."""

__version__ = "0.1.0"

from .columns_condition import (
    ColumnPartition,
    brauer_matrix,
    check_columns_condition,
    single_row_condition,
    verify_partition,
)
from .deuber import (
    DeuberWitness,
    SSetSpec,
    deuber_witness,
    hj_line_search,
    is_F_independent,
    s_set,
)
from .exact_algebra import GF, QQ, Field, Matrix, Mod, rref, span_member
from .fourier import (
    BohrSet,
    bohr_bounds_check,
    bohr_members,
    count_monochromatic_triples,
    dft,
    large_spectrum,
    regular_pair,
)
from .search import (
    Colouring,
    ConstraintSystem,
    Interval,
    ModularStar,
    ZMod,
    enumerate_solutions,
    export_cnf,
    modular_schur_number,
    rado_number,
    valid_colouring_exists,
)
