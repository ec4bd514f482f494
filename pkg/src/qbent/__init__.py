"""q-transform spectra of Boolean functions over GL_n(F2)."""

__version__ = "0.1.0"

from .boolfn import (  # noqa: E402
    BoolFunc,
    classify,
    compose,
    correlation,
    distance,
    imbalance,
    is_bent,
    parse_anf,
    support,
    to_anf,
    walsh_spectrum,
    weight,
)
from .gf2 import (  # noqa: E402
    ZERO,
    BitMatrix,
    BitVec,
    enumerate_gl,
    gl_order,
    invert,
    mapping_matrix,
    rank_of,
    sample_gl,
    vec_mat_mul,
)
from .qtransform import (  # noqa: E402
    allowed_values,
    is_q_bent,
    is_q_nearly_bent,
    is_q_plateaued,
    q_coeff,
    q_spectrum,
    rho,
    second_moments,
    stabilizer,
)
