"""Error hierarchy for pandora_delegation.

Every failure the library raises on purpose derives from ``PandoraError`` and
carries a short machine-readable ``code``.  The CLI maps these onto exit
codes; library callers can catch the base class or a specific subclass.

| Class                  | code                   | Raised when                                          |
|------------------------|------------------------|------------------------------------------------------|
| InvalidDistribution    | invalid_distribution   | atoms with p <= 0, sum != 1, non-finite values       |
| NegativeCap            | negative_cap           | participation fails while computing a cap value      |
| TooLarge               | too_large              | an exact enumeration would exceed its guard          |
| UnsupportedExact       | unsupported_exact      | no exact routine exists for the input                |
| UnsupportedConstraint  | unsupported_constraint | the constructor does not handle this constraint kind |
| NotMatroid             | not_matroid            | a matroid-only routine received a non-matroid        |
| NotPandoraShaped       | not_pandora_shaped     | an index-based agent cannot represent the problem    |
| ModelMismatch          | model_mismatch         | a builder received the wrong utility model           |
| InfeasibleDelta        | infeasible_delta       | no threshold reaches the requested acceptance level  |
| BadParameters          | bad_parameters         | family or command parameters out of range            |
| SolverFailure          | solver_failure         | the LP backend did not return an optimum             |
| ConfigurationError     | configuration_error    | an environment setting could not be parsed           |
| InstanceLoadError      | instance_load_error    | an instance/mechanism file is unreadable             |
"""

from __future__ import annotations


class PandoraError(Exception):
    """Base class; ``code`` is stable and used in reports and exit handling."""

    code = "pandora_error"

    def __init__(self, message: str = "") -> None:
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class InvalidDistribution(PandoraError):
    code = "invalid_distribution"


class NegativeCap(PandoraError):
    code = "negative_cap"


class TooLarge(PandoraError):
    code = "too_large"


class UnsupportedExact(PandoraError):
    code = "unsupported_exact"


class UnsupportedConstraint(PandoraError):
    code = "unsupported_constraint"


class NotMatroid(PandoraError):
    code = "not_matroid"


class NotPandoraShaped(PandoraError):
    code = "not_pandora_shaped"


class ModelMismatch(PandoraError):
    code = "model_mismatch"


class InfeasibleDelta(PandoraError):
    code = "infeasible_delta"


class BadParameters(PandoraError):
    code = "bad_parameters"


class SolverFailure(PandoraError):
    code = "solver_failure"


class ConfigurationError(PandoraError):
    code = "configuration_error"


class InstanceLoadError(PandoraError):
    code = "instance_load_error"
