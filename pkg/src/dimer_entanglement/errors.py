class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class XFormError(ValueError):
    """A density matrix lacks the block (X) structure the closed formula needs."""


class DecompositionError(ValueError):
    """A product decomposition violates the separable-state constraints.

    ``problems`` lists human-readable descriptions of each offending term.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid decomposition: " + "; ".join(self.problems))
