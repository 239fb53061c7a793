from abc import ABC, abstractmethod

from mtdc_hinf.domain.enums import ControlCase
from mtdc_hinf.domain.models import CompositePlant, ControllerSet
from mtdc_hinf.domain.scenario import Scenario


class ICaseStrategy(ABC):
    """Abstract interface for a secondary frequency-regulation strategy."""

    @property
    @abstractmethod
    def case(self) -> ControlCase:
        """The strategy this object designs controllers for."""

    @abstractmethod
    def design(self, plant: CompositePlant, scenario: Scenario) -> ControllerSet:
        """Design the controllers of this strategy for a nominal plant.

        Args:
            plant: The composite plant the controllers are designed on.
            scenario: Weights, gains and synthesis settings.

        Returns:
            The designed controllers, possibly empty.

        Raises:
            NoStabilizingControllerError: If synthesis fails.
        """
