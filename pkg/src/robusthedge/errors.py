"""Exception hierarchy shared by all robusthedge modules."""


class RobustHedgeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RobustHedgeError):
    """Market file is not well-formed (bad JSON, bad rational string, ...)."""


class ValidationError(RobustHedgeError):
    """Market data violates a model invariant.

    ``path`` names the offending field, e.g. ``kernels//u/0``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class ShapeMismatch(RobustHedgeError):
    """A prior does not have the shape of the market it is applied to."""


class ExplosionGuard(RobustHedgeError):
    """An enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration of {count} items exceeds cap {cap}")


class CapacityError(RobustHedgeError):
    """LP solver resource cap exceeded."""


class UnboundedBelow(RobustHedgeError):
    """One-step hedging LP is unbounded below (local no-arbitrage fails)."""


class NoArbitrageViolation(RobustHedgeError):
    """A pricing/duality operation requires no-arbitrage and it fails.

    ``node`` is the first failing node (path tuple), ``certificate`` the
    arbitrage direction when one was computed.
    """

    def __init__(self, node, certificate=None):
        self.node = node
        self.certificate = certificate
        key = "/".join(node) if node is not None else "?"
        super().__init__(f"no-arbitrage fails at node '{key}'")


class InfeasiblePolytope(NoArbitrageViolation):
    """No full-support martingale measure exists (dual side of NA failure)."""


class NoPointError(RobustHedgeError):
    """No strictly feasible point exists."""


class LambdaOutOfRange(RobustHedgeError):
    """Mixing parameter must satisfy 0 < lambda <= 1."""


class BadParameter(RobustHedgeError):
    """Invalid fixture name or parameter."""
