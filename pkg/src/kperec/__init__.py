"""Exact arithmetic for elliptic curves over F_p(t) and its perfect closure.

Heights (naive and canonical, with certified rational error bounds), Tate
reduction data and minimal discriminants, Frobenius twists and the
Verschiebung, torsion across the tower K^{1/p^n}, and the tame-module
descent engine.
"""

from .fields import (PerfElement, Place, Poly, RatFunc, func_height,
                     func_height_via_places, parse_ratfunc, perf_arith,
                     poly_factor, pth_root, residue_degree, valuation)
from .curves import (TowerPoint, WeierstrassCurve, add, curve_new,
                     frobenius_inverse, frobenius_map, frobenius_twist,
                     is_isotrivial, scalar_mul, verschiebung)
from .tate import (DiscriminantReport, ReductionData, discriminant_report,
                   is_semistable, local_minimal_data, minimal_discriminant_degree)
from .heights import (GsCertificate, HeightReport, canonical_height,
                      duplication_height_bound, gs_floor, height_report,
                      lehmer_certificate, naive_height, naive_height_via_places)
from .torsion import (TorsionGroup, count_points, is_torsion_point,
                      torsion_perfect_closure, torsion_subgroup)
from .descent import (DescentResult, EllipticModule, IntegerLattice,
                      bounded_height_points, descend, perfect_closure_generators)

__version__ = "0.1.0"
