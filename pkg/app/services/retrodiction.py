"""
Retrodiction Service
Streams records through a filter bank and infers the initial state
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Iterable, Iterator, Optional

import numpy as np

from app.models.filters import FilterBank, FilterFamily
from app.models.records import HomodyneRecord
from app.models.state import GaussianState
from app.models.statistics import InferredState, RetrodictionReport
from app.models.system import SystemConfig
from app.modules.filters.banks import build_bank, estimate_many
from app.modules.physics.model import config_hash, ensure_validated
from app.modules.simulators.simulator import simulate_shot
from app.modules.states.gaussian import symplectic_eigenvalues
from app.modules.statistics.broadened import broadened_second_moments
from app.modules.statistics.inference import infer_state_cov, physicality_violations, sample_covariance
from app.modules.statistics.mean_square import MeanSquareAccumulator, compare_mean_square
from app.modules.statistics.noise_covariance import noise_covariance_set
from app.core.exceptions import ConfigValidationError, GridMismatchError, InsufficientSamplesError
from app.core.logging import get_logger

logger = get_logger(__name__)

# Shots simulated per worker-pool round; bounds memory of in-flight records
CHUNK = 64
MEAN_SQUARE_BINS = 200


class RetrodictionPipeline:
    """
    Filter bank, estimates, bias covariances and inferred state of one ensemble
    Records are consumed one at a time so ensembles never sit in memory
    """

    def __init__(
        self,
        config: SystemConfig,
        family: str = "gls",
        options: Optional[Dict[str, Any]] = None,
        exact: bool = True,
        workers: int = 1
    ):
        logger.info("🚀 Initializing RetrodictionPipeline")
        self.config = ensure_validated(config)
        self.family = FilterFamily(family)
        self.options = options or {}
        self.exact = exact
        self.workers = max(1, int(workers))
        self._bank: Optional[FilterBank] = None

    @property
    def bank(self) -> FilterBank:
        if self._bank is None:
            self._bank = build_bank(self.config, self.family, self.options)
        return self._bank

    def _simulated(self, state: GaussianState, n_s: int, master_seed: int) -> Iterator[HomodyneRecord]:
        if self.workers == 1:
            for k in range(n_s):
                yield simulate_shot(self.config, state, master_seed, k)[0]
            return
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            for start in range(0, n_s, CHUNK):
                shots = pool.map(
                    lambda k: simulate_shot(self.config, state, master_seed, k)[0],
                    range(start, min(start + CHUNK, n_s)),
                )
                yield from shots

    def run_simulated(self, state: GaussianState, n_s: int, master_seed: int) -> RetrodictionReport:
        """Simulate n_s shots of a known state and retrodict them"""
        if n_s < 2:
            raise InsufficientSamplesError(f"retrodiction needs n_s >= 2 (got {n_s})")
        if state.n_modes != self.config.n_modes:
            raise ConfigValidationError("state", f"{self.config.n_modes} modes", state.n_modes)
        logger.info(f"📋 Simulating and retrodicting {n_s} shots (seed {master_seed})")
        return self.run(self._simulated(state, n_s, master_seed), truth=state, master_seed=master_seed)

    def run(
        self,
        records: Iterable[HomodyneRecord],
        truth: Optional[GaussianState] = None,
        master_seed: Optional[int] = None
    ) -> RetrodictionReport:
        """
        Retrodict a stream of records

        Args:
            records: Records on the config grid
            truth: Known initial state (simulated runs); the mean-square model
                uses it, otherwise the inferred state
            master_seed: Seed recorded in the report

        Returns:
            RetrodictionReport
        """
        bank = self.bank
        nt = self.config.grid.nt
        accumulator = MeanSquareAccumulator(nt, max(1, nt // MEAN_SQUARE_BINS))

        estimates = []
        for record in records:
            if record.nt != nt:
                raise GridMismatchError(f"record of length {record.nt} on a grid of {nt} samples")
            accumulator.update(record.samples)
            estimates.append(estimate_many(bank, record.samples[None, :])[0])
            if master_seed is None:
                master_seed = record.seed
        if len(estimates) < 2:
            raise InsufficientSamplesError(f"retrodiction needs n_s >= 2 (got {len(estimates)})")
        estimates = np.vstack(estimates)
        logger.info(f"✓ Estimated {estimates.shape[0]} shots with the {bank.label()} bank")

        covariance = sample_covariance(estimates)
        noise = noise_covariance_set(self.config, bank, exact=self.exact)
        inferred = infer_state_cov(covariance, noise)

        broadened = None
        if self.family == FilterFamily.AVG and any(o.sigma > 0 for o in self.config.oscillators):
            broadened = broadened_second_moments(self.config, bank, estimates, exact=self.exact)
            violations = physicality_violations(broadened.cov)
            inferred = InferredState(
                mean=broadened.mean,
                cov=broadened.cov,
                se=broadened.se,
                symplectic_eigenvalues=symplectic_eigenvalues(broadened.cov),
                physical=not violations,
                violations=violations,
            )

        model_state = truth if truth is not None else GaussianState(mean=inferred.mean, cov=inferred.cov)
        empirical, se = accumulator.result()
        mean_square = compare_mean_square(self.config, model_state, empirical, se, accumulator.bin_size)

        status = "✅ physical" if inferred.physical else "⚠️  unphysical"
        logger.info(f"{status} inferred state; added occupation " + ", ".join(f"{x:.4g}" for x in noise.delta_n))
        return RetrodictionReport(
            family=bank.label(),
            estimates=estimates,
            covariance=covariance,
            noise=noise,
            inferred=inferred,
            broadened=broadened,
            mean_square=mean_square,
            truth_cov=None if truth is None else truth.cov,
            master_seed=master_seed,
            config_hash=config_hash(self.config),
        )
