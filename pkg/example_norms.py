import logging
import sys

import numpy as np

from poscone import SpaceConfig, TruncatedPositiveOperator, PositiveVector
from poscone import operatorNorm, exposingPerturbation, isAbsolutelyExposing, rtCriterion, localRadius

# Setup logging to StdOut
logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)
logger = logging.getLogger(__name__)


def main():
    entries = np.array([[0.2, 0.5, 0.0], [0.1, 0.0, 0.3], [0.4, 0.2, 0.1]])

    # Same matrix, measured on l_1, l_2, l_3 and the sup-norm space
    for q in (1.0, 2.0, 3.0, float("inf")):
        T = TruncatedPositiveOperator(entries, SpaceConfig(q=q))
        cert = operatorNorm(T)
        logger.info(f"q={q}: ||T|| = {cert.value:.6f} via {cert.method}, witness {cert.witness}")

    # A scalar multiple of the identity is normed by every positive vector;
    # the rank one perturbation singles out one direction
    A = TruncatedPositiveOperator(np.diag([0.5, 0.5]))
    B = exposingPerturbation(A, 0.5)
    logger.info(f"absolutely exposing before: {isAbsolutelyExposing(A)}, after: {isAbsolutelyExposing(B)}")

    # Invariant ideals of the truncated backward shift
    report = rtCriterion(TruncatedPositiveOperator(np.eye(4, k=1)))
    logger.info(f"backward shift irreducible: {report.irreducible}, ideal on {report.invariant_ideal_support}")

    # Local spectral radius of a nilpotent truncation
    estimate = localRadius(TruncatedPositiveOperator(np.triu(np.full((4, 4), 0.2), k=1)), PositiveVector.basis(4, 3), K=10)
    logger.info(f"local radius values {estimate.values[:5]} ... -> {estimate.verdict}")


main()
