"""Deterministic random number generation shared by the whole pipeline.

Every shuffle, split, parameter init and synthetic-data draw goes through
:class:`DetRng` so a seed fully determines all outputs, independently of
Python's hash randomization or library versions.

Algorithm (stable contract, do not change without bumping checkpoint /
corpus format versions):

* state update: splitmix64 -- ``s += 0x9E3779B97F4A7C15`` then two
  xor-shift-multiply finalization steps (Steele et al., "Fast splittable
  pseudorandom number generators").
* ``randrange(n)``: ``next_u64() % n`` (modulo bias is irrelevant for the
  corpus sizes involved; documented for reproducibility, not crypto).
* ``uniform(a, b)``: top 53 bits of ``next_u64`` scaled to [0, 1).
* ``shuffle``: Fisher-Yates from the top of the list down.
"""

MASK64 = (1 << 64) - 1


class DetRng:
    """splitmix64 generator with the few distributions the pipeline needs."""

    def __init__(self, seed):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def randrange(self, n):
        if n <= 0:
            raise ValueError("randrange() argument must be positive")
        return self.next_u64() % n

    def uniform(self, low=0.0, high=1.0):
        u = self.next_u64() >> 11  # 53 random bits
        return low + (high - low) * (u / float(1 << 53))

    def shuffle(self, items):
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        if not items:
            raise ValueError("choice() on empty sequence")
        return items[self.randrange(len(items))]

    def sample_indices(self, n, k):
        """k distinct indices out of range(n), in ascending order."""
        if k > n:
            raise ValueError(f"cannot sample {k} from {n}")
        idx = list(range(n))
        self.shuffle(idx)
        return sorted(idx[:k])
