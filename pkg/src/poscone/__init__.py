from .poscone_const import NORM_METHOD, VERDICT, ENSEMBLE_KIND, MATRIX_FORMAT, NORMALIZATION, SUBCOMMAND, EXIT_CODE
from .poscone_errors import PosconeException, ConfigError, DimensionError, PositivityError, DegenerateInputError, ContractionError, DeltaTooLargeError, UnsupportedError, IterationLimitError, SolverError, RecipeError, RelationError, ConsistencyError, InterchangeException
from .poscone_core import SpaceConfig, GeneralVector, PositiveVector, TruncatedPositiveOperator
from .poscone_norms import NormCertificate, vectorNorm, operatorNorm, isContraction, dualNormingFunctional, exposingPerturbation, isAbsolutelyExposing, restrictedDefect
from .poscone_ideals import SupportDigraph, IdealReport, supportDigraph, rtCriterion, hasDisjointColumnSupports
from .poscone_spectral import PerronPair, LocalRadiusEstimate, perronPair, localRadius, diagonalChain, zeroDiagonalIndices, orbitNormDecay, finiteSpectrum
from .poscone_commutant import CommutantBasis, CommutantConstraint, FeasibilityResult, SolverStatus, CommutantSolverBase, CommutantSolverHighs, commutantBasis, coneMaximize, fSetMembership, aabWitnessSearch
from .poscone_constructions import ConstructionRecipe, CollapseReport, buildTheoremOperator, maxAdmissibleDelta, rankOnePerturbation, maxRankOneDelta, perronCancellationCheck, approximationError, strictlyPositiveApproximant, verifyTheoremCommutantCollapse, verifyCollapseAcrossTruncations
from .poscone_sampler import EnsembleSpec, TypicalityReport, sample, sampleOne, typicalityReport
from .poscone_io import operatorFromDict, operatorToDict, recipeFromDict, ensembleSpecFromDict, readOperator, readRecipe, writeJson
from .poscone_cli import run, main
