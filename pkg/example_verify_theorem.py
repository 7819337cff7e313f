import asyncio
import logging
import sys

import numpy as np

from poscone import SpaceConfig, TruncatedPositiveOperator, ConstructionRecipe
from poscone import buildTheoremOperator, approximationError, operatorNorm, verifyCollapseAcrossTruncations

# Setup logging to StdOut
logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)
logger = logging.getLogger(__name__)


async def main():
    M = TruncatedPositiveOperator(np.array([[0.3, 0.1], [0.1, 0.2]]), SpaceConfig(q=2.0))
    recipe = ConstructionRecipe.create(M, N=1, p=0, epsilon=0.5, L=8)
    logger.info(f"delta={recipe.delta:.6g}, schedule={recipe.delta_schedule}")

    T = buildTheoremOperator(recipe)
    logger.info(f"||T|| = {operatorNorm(T).value:.6f}, distance to M on E_N: {approximationError(T, M, recipe.N):.6f}")

    reports = await verifyCollapseAcrossTruncations(recipe, steps=3, eta=1e-3, threads=4)
    for report in reports:
        feasible = [r.constraint for r in report.results if r.feasible]
        logger.info(f"L={report.truncation_dim}: commutant rank {report.commutant_rank}, feasible constraints {feasible}")
        for assertion in report.assertions:
            logger.info(f"    {assertion.description}: {'holds' if assertion.holds else 'FAILS'} (mass {assertion.value:.3e})")


asyncio.run(main())  # main loop
