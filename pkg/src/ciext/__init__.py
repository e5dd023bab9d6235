"""Exact graded homological algebra over complete intersections over F_p.

Groebner bases for polynomial modules, minimal free resolutions, Eisenbud
operators, Ext modules, and grids of depth, grade and Bass numbers of
Ext^{2i+t}(M, N/I^n N) with stabilization, fitting and recurrence checks.
"""

from .asymptotics import (GridResult, PolyFit, RecurrenceSpec, StabilityReport, bass_grid,
                          check_recurrence, depth_grid, detect_stabilization,
                          fit_bivariate_polynomial, grade_grid, length_grid)
from .ci_ring import CIRing, verify_regular_sequence
from .errors import (CiExtError, ComposeNotZero, DimensionMismatch, EngineConsistencyError,
                     ExponentOverflow, ImproperIdeal, LiftFailure, NoFit, NotHomogeneous,
                     NotRegularSequence, TailOutsideGrid, WindowTooSmall, ZeroInverse)
from .groebner import GroebnerBasis, buchberger, divide, ideal_quotient, member, syzygy_basis
from .linalg import PrimeField, kernel_basis, rref
from .modules import (INFINITE, IdealSpec, ModuleMap, PresentedModule, image, kernel, minimalize,
                      rees_family, subquotient)
from .polyring import MonomialOrder, Polynomial, PolyRing
from .resolution import (EisenbudOperators, FreeResolution, bass, depth, eisenbud_operators, ext,
                         extend_resolution, grade, koszul_depth, t_action)

__version__ = "0.1.0"
