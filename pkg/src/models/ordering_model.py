from dataclasses import dataclass
from typing import Sequence, Tuple

from utils import InvalidConfig, format_order, parse_order


@dataclass(frozen=True, order=True)
class Ordering:
    """Total order over parties, earliest first."""
    permutation: Tuple[int, ...]

    def __post_init__(self):
        permutation = tuple(int(p) for p in self.permutation)
        if sorted(permutation) != list(range(len(permutation))):
            raise InvalidConfig(f"{permutation} is not a permutation of the parties")
        object.__setattr__(self, "permutation", permutation)

    @classmethod
    def parse(cls, text: str, n_parties: int = None) -> "Ordering":
        try:
            return cls(parse_order(text, n_parties))
        except ValueError as e:
            raise InvalidConfig(str(e)) from e

    @classmethod
    def of(cls, parties: Sequence[int]) -> "Ordering":
        return cls(tuple(parties))

    @property
    def n_parties(self) -> int:
        return len(self.permutation)

    def position(self, party: int) -> int:
        return self.permutation.index(party)

    def precedes(self, i: int, j: int) -> bool:
        return self.position(i) < self.position(j)

    def __iter__(self):
        return iter(self.permutation)

    def __len__(self):
        return len(self.permutation)

    def __str__(self):
        return format_order(self.permutation)
