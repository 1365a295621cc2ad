"""Simulation and (cyclo-)passivity analysis of ideal energy-storing memelements."""

from .constitutive import ConstitutiveCurve, DomainError, affine, inertance_curve, polynomial, table
from .harvest import HarvestProblem, HarvestResult, objective, optimize
from .models import MemelementModel, SingularityError, mem_inerter, model_from_dict
from .passivity import PassivityVerdict, StorageAnsatz, falsify, state_grid, storage_ansatz
from .signals import ExcitationSignal, fourier, reference_force_profile
from .sim import EnergyReport, SimulationError, Trajectory, audit, integrate, lissajous_export

__version__ = "0.1.0"
