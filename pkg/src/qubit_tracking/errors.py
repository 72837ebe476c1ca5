"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class InfeasibleStateError(ValueError):
    """Initial population/coherence pair is not a valid density matrix."""


class InfeasiblePrescriptionError(ValueError):
    """The prescribed population implies a negative squared coherence."""


class PrescriptionError(ValueError):
    """A prescription fails an admissibility check (e.g. the phase constraint)."""


class ProfileError(ValueError):
    """A profile cannot be constructed from the given parameters."""


class SingularityError(ArithmeticError):
    """The synthesized field diverges inside the reported time window."""

    def __init__(self, message, window):
        self.window = window
        super().__init__(f"{message} (t in [{window[0]:.6g}, {window[1]:.6g}])")


class IntegrationError(RuntimeError):
    """A propagated state left the physical region."""

    def __init__(self, message, time):
        self.time = time
        super().__init__(f"{message} at t={time:.6g}")


class CapabilityError(NotImplementedError):
    """The requested evaluation path is not available for this input."""
