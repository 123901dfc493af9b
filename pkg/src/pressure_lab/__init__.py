"""pressure-lab: topological pressure functions and their phase transitions.

Computes pressure curves t -> P(t) for finite symbolic models and explicit
2D maps, builds composite scenarios with prescribed kink/freezing behavior,
and detects transitions on sampled curves.
"""

__version__ = "0.1.0"

from .analysis import (
    AffineBranch,
    Freezing,
    Kink,
    PressureCurve,
    TransitionReport,
    analyze_curve,
    detect_freezing,
    detect_kinks,
    legendre_transform,
    upper_envelope,
)
from .maps import SmoothMap2D, get_map, list_maps
from .markov import (
    MarkovMeasure,
    MarkovModel,
    PerronData,
    equilibrium_measure,
    integral_of_potential,
    markov_entropy,
    perron_root,
    pressure,
    pressure_derivative,
)
from .scenarios import (
    CompositeScenario,
    build_axiom_a,
    build_hybrid,
    build_multi_attractor,
    build_neutral,
    build_product_example,
    build_two_sinks,
    composite_pressure,
    parse_scenario_file,
    parse_scenario_text,
)
from .smooth2d import (
    PeriodicOrbit,
    PotentialSpec,
    SplittingEstimate,
    birkhoff_average,
    constrained_pressure_estimate,
    domination_check,
    eigenvalue_potential,
    find_periodic_orbits,
    geometric_potential,
    lyapunov_exponents,
    orbit_pressure_estimate,
    oseledets_directions,
)

__all__ = [name for name in dir() if not name.startswith("_")]
