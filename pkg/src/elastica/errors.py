"""Exception hierarchy. Every numerical failure derives from ElasticaError."""


class ElasticaError(Exception):
    """Base class for failures raised by the solvers."""


class StepUnderflow(ElasticaError):
    """Adaptive stepping stalled (step below the floor or step budget spent)."""


class NoConvergence(ElasticaError):
    def __init__(self, max_iter: int, last_change: float):
        super().__init__(f"no convergence after {max_iter} iterations (last change {last_change:.3e})")
        self.max_iter = max_iter
        self.last_change = last_change


class LostBracket(ElasticaError):
    """Shooting residual no longer changes sign across a bracket."""


class SeedInvalid(ElasticaError):
    pass


class BadStraddle(ElasticaError):
    """Secondary solutions do not exist at b_hi only, as fold detection requires."""


class NotStationary(ElasticaError):
    pass


class DomainError(ElasticaError, ValueError):
    pass


class MaxIterations(ElasticaError):
    def __init__(self, max_iter: int, grad_norm: float):
        super().__init__(f"descent stopped after {max_iter} iterations, |grad| = {grad_norm:.3e}")
        self.max_iter = max_iter
        self.grad_norm = grad_norm


class HypothesisFailed(ElasticaError):
    """A gluing hypothesis does not hold; ``hypothesis`` names which one."""

    def __init__(self, hypothesis: str, detail: str = ""):
        super().__init__(f"gluing hypothesis '{hypothesis}' failed" + (f": {detail}" if detail else ""))
        self.hypothesis = hypothesis
