import enum


class PerturbationChoice(enum.Enum):
    """How the coordinate-k perturbed value Z_k is formed.

    MAURER_INF replaces coordinate k by the value minimising Z (right tail);
    LEFT_SUP replaces it by the value maximising Z (left tail).
    """

    MAURER_INF = "maurer"
    LEFT_SUP = "left"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"maurer": cls.MAURER_INF, "maurer_inf": cls.MAURER_INF, "inf": cls.MAURER_INF,
                   "left": cls.LEFT_SUP, "left_sup": cls.LEFT_SUP, "sup": cls.LEFT_SUP}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown perturbation choice {value!r}") from None

    def admits(self, lam):
        """Whether ``lam`` has the sign this choice needs in the log-Sobolev step."""
        return lam >= 0 if self is PerturbationChoice.MAURER_INF else lam <= 0


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"
