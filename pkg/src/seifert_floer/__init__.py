"""Full-path Heegaard Floer computations on star-shaped plumbings and the
negative-twisting tight contact structures of Seifert fibred spaces."""

from .contact import (
    ClassificationReport,
    ContactStructure,
    RealisedVector,
    TwistingSet,
    classify,
    count_formula,
    ghiggini_massot,
    predict_torus_surgery,
    realised_vectors,
    tw_bar,
    twisting_numbers_via_heights,
)
from .errors import ConsistencyError, ContractError, DomainError, ParseError, SeifertFloerError, UnsupportedError
from .lattice import (
    FullPath,
    SpinCLabel,
    alexander,
    canonical_vector,
    enumerate_basis,
    full_path,
    height,
    is_l_space,
    maslov,
    spin_c_label,
    tau,
)
from .numtheory import best_upper_approx, neg_cont_frac, simplest_fraction_in
from .plumbing import (
    SeifertInvariants,
    StarGraph,
    brieskorn,
    normalize,
    parse_manifold,
    standard_graph,
    torus_knot_surgery,
)

__version__ = "0.1.0"
