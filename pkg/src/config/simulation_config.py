from dataclasses import dataclass


@dataclass
class DemoConfig:
    """Defaults for the two narrated demos.

    Bob's measurement time is fixed before Alice's in the naive demo so that
    every round is Bob-first; the upgraded demo draws both times uniformly.
    """
    rounds: int = 100_000
    bob_time: float = 0.0
    alice_time: float = 1.0
    timing_window: float = 1.0
    alice_input_dist: tuple = (0.5, 0.5)
    bob_input_dist: tuple = (0.5, 0.5)

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError(f"rounds must be non-negative, got {self.rounds}")
        if not self.bob_time < self.alice_time:
            raise ValueError(
                f"Bob must measure first in the naive demo, got "
                f"bob_time={self.bob_time}, alice_time={self.alice_time}"
            )
        if self.timing_window <= 0:
            raise ValueError(f"timing_window must be positive, got {self.timing_window}")
