"""
Reference context tables for the two-party binary CHSH scenario.

Each table is a list of rows ((x, y), (a, b)): the context on the left,
the stored values on the right. The two one-way tables satisfy
(a + b) mod 2 = x*y on every row, so each reaches CHSH value 4.
"""

# Signals from Alice to Bob: a = 0, b = x*y. With y = 1 Bob reads b = x.
A_TO_B_TABLE = [
    ((0, 0), (0, 0)),
    ((0, 1), (0, 0)),
    ((1, 0), (0, 0)),
    ((1, 1), (0, 1)),
]

# The assignment stored for the order t_A > t_B: a = x*y, b = 0.
B_TO_A_TABLE = [
    ((0, 0), (0, 0)),
    ((0, 1), (0, 0)),
    ((1, 0), (0, 0)),
    ((1, 1), (1, 0)),
]

# Circular signaling: a = y and b = x.
CYCLIC_TABLE = [
    ((0, 0), (0, 0)),
    ((0, 1), (1, 0)),
    ((1, 0), (0, 1)),
    ((1, 1), (1, 1)),
]
