"""polykay: exact unbiased estimators of cumulants and cumulant products.

Generates k-statistics, polykays, and their multivariate forms as exact
polynomials in sample power sums, verifies every formula with an independent
symbolic-expectation oracle, evaluates them on data, and serves all of it
over a CLI and an HTTP API.
"""

from .combinatorics import (
    IntegerPartition,
    Multiset,
    Subdivision,
    d_coefficient,
    enumerate_partitions,
    enumerate_subdivisions,
    merge_subdivisions,
    partition_pairs,
    stirling2,
)
from .errors import (
    CapacityError,
    DataParseError,
    DimensionError,
    PolykayError,
    SampleSizeError,
    UsageError,
)
from .estimators import (
    EstimatorExpr,
    EstimatorSpec,
    augmented_estimator,
    cumulant_product_coefficients,
    k_statistic,
    multivariate_k_statistic,
    multivariate_polykay,
    p_polynomial,
    polykay,
    y_substitution_constant,
)
from .evaluator import Dataset, compute_power_sums, evaluate, ingest, ingest_text
from .oracle import (
    CertificationRecord,
    brute_force_expectation,
    check_unbiased,
    cumulant_in_moments,
    expectation_power_sum_poly,
)
from .polyring import (
    Polynomial,
    RationalFunctionOfN,
    Symbol,
    emit,
    parse_json,
    power_sum,
    substitute_y_powers,
)

__version__ = "0.1.0"
