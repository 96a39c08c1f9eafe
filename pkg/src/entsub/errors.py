"""Exception hierarchy shared by all entsub modules."""


class EntsubError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(EntsubError, ValueError):
    """Arguments violate an operation's preconditions."""


class LinearDependenceError(InvalidInput):
    """A list of vectors is numerically linearly dependent."""

    def __init__(self, message, rank=None, smallest_singular_value=None):
        super().__init__(message)
        self.rank = rank
        self.smallest_singular_value = smallest_singular_value


class EmptyComplementError(InvalidInput):
    """The orthogonal complement of the full space was requested."""


class DegeneratePencilError(EntsubError):
    """det(alpha*A + beta*B) vanishes identically."""


class CountingUnsupported(EntsubError):
    """Product counting requested where the generic count is infinite."""

    def __init__(self, message, formula_expected="infinite"):
        super().__init__(message)
        self.formula_expected = formula_expected


class SearchFailure(EntsubError):
    """No product state was found in the complement for one member of a state set.

    Attributes
    ----------
    index : int
        Position of the state whose identifying product state was not found.
    best_overlap : float
        Best objective reached by the search in that complement.
    witness : dict or None
        Exact Schmidt ranks of the complement vector across every single-factor
        cut, available only when the complement is one-dimensional.
    """

    def __init__(self, message, index, best_overlap, witness=None):
        super().__init__(message)
        self.index = index
        self.best_overlap = best_overlap
        self.witness = witness


class IndefiniteRemainderError(EntsubError):
    """The inconclusive POVM element is not positive semidefinite."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NumericalConsistencyError(EntsubError):
    """Outcome probabilities are negative beyond round-off or do not sum to one."""
