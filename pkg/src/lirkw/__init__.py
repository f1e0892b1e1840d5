"""Linearly-implicit Runge-Kutta W-methods with approximate matrix factorization.

Submodules
----------
tableau       coefficient sets, validation, text format
linop         linear parts and AMF operators
integrators   type 1-3 steppers and a fixed-step driver
trees         LW-trees, order conditions
stability     transfer matrices and real-axis scans
problems      built-in test problems
convergence   sweeps and order fitting
"""
__version__ = "0.1.0"

from .errors import (DegenerateParameters, FamilyMismatch, LirkwError, NonfiniteState,
                     NotAMeagreTree, SingularFactor, SingularStageSystem, TableauFormatError,
                     UnknownProblem)
from .tableau import MethodType, Tableau, table1_type1, table2_type2, validate
from .linop import AmfOperator, DenseLinearPart, DiagonalLinearPart, TridiagonalLinearPart
from .integrators import IVProblem, integrate, step_type1, step_type2, step_type3
from .trees import LWTree, enumerate_trees, verify_order
from .stability import stability_scan, transfer
