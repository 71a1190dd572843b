from __future__ import annotations

from typing import TYPE_CHECKING

from rfiforge.studies.comparison import MitigationComparison
from rfiforge.studies.gamma import GammaStudy
from rfiforge.studies.smearing import SmearingStudy

if TYPE_CHECKING:
    from rfiforge.simulator import Simulator


class StudiesMixin:
    _simulator: Simulator

    def __init__(self, simulator: Simulator):
        self._simulator = simulator

        self._gamma_study = GammaStudy(self._simulator)
        self._smearing_study = SmearingStudy(self._simulator)
        self._mitigation_comparison = MitigationComparison(self._simulator)

    @property
    def gamma(self) -> GammaStudy:
        return self._gamma_study

    @property
    def smearing(self) -> SmearingStudy:
        return self._smearing_study

    @property
    def comparison(self) -> MitigationComparison:
        return self._mitigation_comparison
