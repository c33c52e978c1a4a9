"""Dimer models on toroidal graphs, Mahler measures of their characteristic
polynomials, and bipyramid volumes of biperiodic alternating links."""

from .catalog import (
    ConjectureReport,
    FaceVector,
    LinkRecord,
    bipyramid_volume_of,
    builtin_links,
    closed_form_2pi_m,
    cn_polynomial,
    cn_record,
    cn_table,
    comparison_table,
    get_link,
    verify_conjecture,
)
from .dimer import (
    Edge,
    ToroidalGraph,
    characteristic_polynomial,
    count_dimers_enumeration,
    count_dimers_formula,
    entropy_sequence,
    kasteleyn_matrix,
    load_graph,
    torus_cover,
    verify_kasteleyn_signs,
)
from .laurent import (
    LaurentMatrix,
    LaurentPoly2,
    ParseError,
    UnivariatePoly,
    determinant,
    face_polynomials,
    format_poly,
    newton_polygon,
    parse_poly,
)
from .mahler import MahlerConfig, MahlerEstimate, mahler_bivariate, mahler_univariate, smyth_lower_bound
from .special import CONSTANTS, bipyramid_volume, bloch_wigner, dilog, lobachevsky

__version__ = "0.1.0"
