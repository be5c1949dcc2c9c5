"""braidalg: exact symbolic verification for phase-braided graded *-algebras.

Subpackages:

* ``scalars``  - Laurent ring in a formal unit-modulus phase over the
  rationals with formal square roots, optional root-of-unity specialization;
* ``algebra``  - graded letters, noncommutative polynomials, matrix helpers;
* ``braided``  - leg-indexed words with the phase-accumulating normal form;
* ``simplify`` - the relation-driven reduction and verification engine;
* ``graphalg`` - finite graphs, spectral radius, the equilibrium state;
* ``uqf``      - the braided unitary presentation, its bosonization, the
  one-vertex-graph action and the proposition-level suites;
* ``fusion``   - the free fusion ring on a charge and a two-letter monoid;
* ``cli``      - the batch command-line front end.
"""

from .scalars import FORMAL, Scalar, ZetaSpec, zeta, sqrt, rational
from .algebra import GradedPoly, Letter, NOT_HOMOGENEOUS, conjugate_matrix
from .braided import LeggedLetter, LeggedPoly, TensorPoly, braided_mul, embed, psi_flatten
from .simplify import RelationSet, VerificationReport, verify_identity
from .graphalg import GraphData, KmsData, check_dagger, kms_eval, vertex_matrix
from .fusion import Irrep, Word, conjugate_irrep, dimension, fuse, word_bar

__version__ = "0.1.0"
