from .core import (  # noqa: F401
    MetError, Verdict, PseudoMetSpace, MetSpace, SetFunction, NonexpMap, Cocone, Leg,
    FiniteChain, ColimitCocone, as_metric, empty_space, one_point, two_point, discrete,
    line, compose, identity, constant, inclusion, subspace, hom_distance, is_isometry,
    is_coisometry, homset, final_pseudometric, metric_quotient, coproduct, product,
    conical_limit, colimit_chain,
)
