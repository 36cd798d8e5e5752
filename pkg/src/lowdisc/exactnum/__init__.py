"""Exact rationals, certified enclosures, alpha descriptions and constants."""

from .constants import (
    DEFAULT_BITS,
    bernoulli_number,
    log_enclosure,
    max_bits,
    nth_root,
    pi_enclosure,
    pi_power,
    power_enclosure,
    zeta_enclosure,
    zeta_even,
    zeta_even_coefficient,
    zeta_real,
)
from .enclosure import (
    Enclosure,
    Position,
    Rational,
    as_enclosure,
    as_rational,
    format_decimal,
    format_exact,
    format_rational,
    parse_rational,
)
from .realspec import (
    E,
    ALPHA_GRAMMAR,
    NAMED,
    PHI,
    SQRT2,
    SQRT3,
    EulerE,
    ExplicitCF,
    QuadraticSurd,
    RationalValue,
    RealSpec,
    is_rational,
    parse_spec,
    partial_quotients,
    refine,
    spec_text,
)
