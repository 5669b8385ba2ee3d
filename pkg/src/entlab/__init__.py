"""Numerical toolkit for bipartite entanglement, matrix product states,
area-law experiments, and kinetic Ising models.

The most commonly used names are re-exported here; the full surface lives in
the submodules (:mod:`entlab.linalg`, :mod:`entlab.states`,
:mod:`entlab.measures`, :mod:`entlab.haar`, :mod:`entlab.mps`,
:mod:`entlab.chains`, :mod:`entlab.freefermion`, :mod:`entlab.kinetic`).
"""

__version__ = "0.1.0"

from .states import (  # noqa: F401
    DensityMatrix,
    PureState,
    SchmidtDecomposition,
    bell_state,
    is_ppt,
    max_entangled,
    mutual_information,
    partial_trace,
    partial_transpose,
    renyi_entropy,
    schmidt,
    von_neumann_entropy,
)
from .measures import (  # noqa: F401
    Witness,
    concurrence_2q,
    concurrence_pure,
    eof_2q,
    log_negativity,
    negativity,
    witness_from_npt,
)
from .haar import (  # noqa: F401
    haar_pure,
    mean_entropy_exact,
    mean_entropy_mc,
    mean_purity_exact,
)
from .mps import (  # noqa: F401
    MatrixProductState,
    canonicalize,
    classical_superposition_mps,
    from_dense,
    ghz_mps,
    truncate,
)
from .chains import (  # noqa: F401
    SpinHamiltonian,
    block_entropy_scan,
    build_xy,
    ground_state,
    thermal_state,
)
from .kinetic import (  # noqa: F401
    KineticModel,
    TauSector,
    build_generator,
    check_detailed_balance,
    sector_split_evolve,
    symmetrize,
)
