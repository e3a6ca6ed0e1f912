"""
Exception hierarchy shared by every pass.

Diagnostics and two-color violations are returned as values; these exceptions
are reserved for malformed input and for passes that cannot produce a result.
"""


class TwoPhaseError(Exception):
    """Base class for all errors raised by py_twophase."""


class ConfigError(TwoPhaseError):
    """Invalid pipeline configuration."""


class LibraryError(TwoPhaseError):
    """Malformed or inconsistent cell library."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class CanonicalFormatError(TwoPhaseError):
    """Canonical JSON netlist could not be parsed into a valid netlist."""


class VerilogSyntaxError(TwoPhaseError):
    """Lexical or syntax error in structural Verilog input."""

    def __init__(self, message, span):
        self.span = span
        self.message = message
        super().__init__(f"{span}: {message}")


class UnsupportedConstructError(VerilogSyntaxError):
    """Verilog construct outside the structural subset."""

    def __init__(self, construct, span):
        super().__init__(f"unsupported construct: {construct}", span)


class NetlistError(TwoPhaseError):
    """Structural problem that prevents a pass from running."""


class CombinationalCycleError(NetlistError):
    def __init__(self, instances):
        self.instances = list(instances)
        super().__init__(f"combinational cycle through {', '.join(self.instances)}")


class TransformError(TwoPhaseError):
    """A transformation pass rejected its input."""


class RetimeError(TwoPhaseError):
    """Lags could not be realized on the netlist."""

    def __init__(self, message, vertex=None):
        self.vertex = vertex
        super().__init__(message)


class InfeasibleRetiming(RetimeError):
    """No legal retiming meets the requested period."""

    def __init__(self, target, critical_delay, path):
        self.target = target
        self.critical_delay = critical_delay
        self.path = list(path)
        super().__init__(
            f"target period {target:g} ns infeasible; critical path {critical_delay:g} ns "
            f"through {' -> '.join(self.path)}"
        )


class SimulationError(TwoPhaseError):
    """Simulation could not settle or was given inconsistent inputs."""


class ClockDomainError(TwoPhaseError):
    """A sequential element's clock could not be traced to exactly one phase."""

    def __init__(self, instance, message):
        self.instance = instance
        super().__init__(f"{instance}: {message}")


class TimingError(TwoPhaseError):
    """Timing analysis preconditions not met."""


class InfeasiblePeriod(TimingError):
    """The period cannot be met.

    Either arrivals did not converge (a positive borrowing loop, ``loop`` is
    True) or they settled past some latch's closing edge minus its setup.
    """

    def __init__(self, latches, iterations, loop=True):
        self.latches = sorted(latches)
        self.iterations = iterations
        self.loop = loop
        where = ", ".join(self.latches)
        if loop:
            message = f"positive borrowing loop after {iterations} iterations through {where}"
        else:
            message = f"arrival past the closing edge at {where}"
        super().__init__(message)
