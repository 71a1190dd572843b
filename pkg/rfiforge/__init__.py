"""
RFI Forge
~~~~~~~~~

Simulation of spatial interference mitigation on antenna arrays: subspace
projection, subspace smearing of moving interferers and lag subtraction

:copyright: (c) 2024-present Jus-Codin
:license: MIT, see LICENSE for more details.
"""

__title__ = "rfiforge"
__author__ = "Jus-Codin"
__license__ = "MIT"
__version__ = "0.1.0"

__all__ = [
    "Simulator",
    "MitigationMethod",
    "ScenarioConfig",
    "ArrayGeometry",
    "RfiModel",
    "CosmicSource",
    "SkyGrid",
    "StudyVariant",
]

from rfiforge.models.imaging import SkyGrid
from rfiforge.models.mitigation import MitigationMethod
from rfiforge.models.scenario import ArrayGeometry, CosmicSource, RfiModel, ScenarioConfig
from rfiforge.models.studies import StudyVariant
from rfiforge.simulator import Simulator
