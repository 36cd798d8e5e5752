"""Reference levels recorded from the first full run of the sweeps.

These quantities are only known to be O(1), with no explicit constant. Later runs
must reproduce them within 10%; a drift beyond that signals a change in
the numerics rather than in the mathematics.
"""

from fractions import Fraction

# max |l2sq - theorem1_main| over n = 2^8..2^13 (theorem1-equivalence)
THEOREM1_MAX_RESIDUAL = {"phi": 0.433997, "sqrt2": 0.436277}

# max - min of the Beck deviation over n = 2^5..2^17 (beck-boundedness)
BECK_SPREAD = {"phi": 0.0110951, "sqrt2": 0.0185749}

# max |barkan_estimate - s_{1,1}(a, b)| over coprime pairs, b <= 200
BARKAN_MAX_DEVIATION = Fraction(299, 1200)
