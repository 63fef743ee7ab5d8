"""Cone-truncated persistent homology of functions and metric-measure spaces."""

from .complex import (
    Cell,
    Complex,
    FilteredComplex,
    cycle_graph,
    filtration_order,
    grid_to_cubical,
    lower_star_filtration,
    simplicial_complex,
)
from .cone import cone_complex, cone_diagram, cone_map, cone_routes, truncate_diagram, verify_strong_pairing
from .diffusion import (
    SpectralKernel,
    WeightedGraph,
    diagram_path,
    diffusion_distance,
    diffusion_mm,
    heat_kernel,
    scale_stability_bound,
    spectrum,
)
from .errors import InputError, InvariantError
from .mmspace import (
    Attestation,
    Coupling,
    FiniteMMSpace,
    PairingCertificate,
    centrality_function,
    coupling_distortion,
    correspondence_distortion,
    delta_p_upper_bound,
    dp_alpha,
    dp_mu,
    empirical_mm,
    frechet_function,
    pairing_distortion,
    theta_p,
)
from .persistence import INF, PersistenceDiagram, interleaving_distance, reduce, reduced_diagram
from .transport import bottleneck, bottleneck_bruteforce, wasserstein

__version__ = "0.1.0"
