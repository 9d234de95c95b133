import math

# Tolerances
NORM_TOL = 1e-9
PRUNE_WEIGHT = 1e-12
FILLER_MASS_THRESHOLD = 1e-14  # prefix mass at or below this counts as unreachable

# Desk-scale guards
MAX_ENUMERATED_OBJECTS = 10**7
MAX_REPOSITORY_PARTIES = 6      # n! precomputed decompositions
ORDER_LISTING_PARTY_LIMIT = 8   # above this, compatible orders are truncated
MAX_LISTED_ORDERS = 1000

# Randomness
DEFAULT_SEED = 0
MAX_SEED = 2**64 - 1

# Statistics
MIN_EXPECTED_COUNT = 5
INDEPENDENCE_ALPHA = 0.01

# CHSH
CHSH_CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2 * math.sqrt(2)
NO_SIGNALING_BOUND = 4.0
# Singlet angles reaching |S| = 2*sqrt(2): (a0, a1), (b0, b1)
SINGLET_CHSH_ANGLES = ((0.0, math.pi / 2), (math.pi / 4, -math.pi / 4))
