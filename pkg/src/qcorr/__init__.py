"""Two-qubit correlation dynamics under intrinsic decoherence.

The spin-squeezing (one-axis-twisting) Hamiltonian drives Bell-diagonal or
Werner states; concurrence, local quantum uncertainty, trace distance
discord and uncertainty-induced nonlocality are tracked in time.
"""

from .evolution import (
    integrate_master,
    kraus_operators,
    propagate_kraus,
    propagate_spectral,
    steady_state,
)
from .hamiltonian import (
    Eigensystem,
    ModelParams,
    analytic_eigensystem,
    bohr_frequencies,
    build_hamiltonian,
    eigensystem,
)
from .measures import (
    MeasureResult,
    concurrence,
    concurrence_x,
    lqu,
    lqu_bruteforce,
    tdd_bruteforce,
    tdd_x,
    uin,
    uin_bruteforce,
    w_matrix,
)
from .states import (
    BellDiagonalSpec,
    WernerSpec,
    XStateElements,
    bell_diagonal,
    elements_from_density,
    evolved_bell_diagonal_elements,
    evolved_werner_elements,
    werner,
    x_state_from_elements,
)

__version__ = "0.1.0"
