import asyncio
import logging
import sys

from poscone import EnsembleSpec, ENSEMBLE_KIND, typicalityReport

# Setup logging to StdOut
logging.basicConfig(stream=sys.stdout, level=logging.DEBUG)
logger = logging.getLogger(__name__)


async def main():
    for kind in ENSEMBLE_KIND:
        spec = EnsembleSpec(dim=6, q=2.0, kind=kind, count=200, seed=20240601)
        report = await typicalityReport(spec)

        logger.info(f"{kind}:")
        for row in report.rows():
            logger.info(f"    {row['property']:<26} {row['frequency']:.3f} +/- {row['radius']:.3f}")

    logger.info(report.disclaimer)


asyncio.run(main())  # main loop
