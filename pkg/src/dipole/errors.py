"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class ValidationError(ValueError):
    """Input data violates a structural invariant (shape, symmetry, sign)."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but degenerate for the requested operation."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or produced an unusable result."""


class DisconnectedGraphError(RuntimeError):
    """Shortest paths requested on a graph with more than one component."""

    def __init__(self, n_components: int):
        self.n_components = n_components
        super().__init__(
            f"neighbor graph has {n_components} connected components; "
            "enable auto-connect or increase the neighbor count"
        )


class MatchingConsistencyError(RuntimeError):
    """A diagram matching no longer agrees with the diagrams it was built from."""
