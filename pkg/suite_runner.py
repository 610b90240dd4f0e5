"""
SuiteRunner - Runs the trials of a verification suite on worker threads.

Every trial index gets its own numpy Generator seeded from
(seed, suite code, index). Workers pull indices from a shared counter and
write into a SuiteState, so results do not depend on scheduling.
"""

import logging
import threading
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from run_metrics import default_thread_count, log_run_metrics
from suite_state import SuiteState

logger = logging.getLogger(__name__)

# Seconds to wait for each worker when stopping
JOIN_TIMEOUT = 5.0


def case_rng(seed: int, suite_code: int, index: int) -> np.random.Generator:
    """Independent random stream for one trial."""
    return np.random.default_rng([seed, suite_code, index])


class SuiteRunner:
    """Manages the worker threads of suite runs."""

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize SuiteRunner from the run configuration.

        Args:
            config: Configuration dictionary (see config.py); uses seed,
                    threads and threads_cap
        """
        self.config = config
        self.seed = int(config.get("seed", 42))
        self.thread_count = default_thread_count(config.get("threads"), config.get("threads_cap"))
        self._stop_event = threading.Event()
        self._workers: List[threading.Thread] = []
        logger.info(f"SuiteRunner initialized with {self.thread_count} worker(s), seed {self.seed}")

    def _start_workers(self, name: str, count: int, work: Callable[[int], None]):
        lock = threading.Lock()
        cursor = [0]

        def loop():
            while not self._stop_event.is_set():
                with lock:
                    index = cursor[0]
                    if index >= count:
                        return
                    cursor[0] += 1
                work(index)

        self._stop_event.clear()
        self._workers = [
            threading.Thread(target=loop, daemon=True, name=f"{name}-worker-{i}")
            for i in range(min(self.thread_count, max(1, count)))
        ]
        for thread in self._workers:
            thread.start()

    def _wait(self):
        for thread in self._workers:
            thread.join()
        self._workers = []

    def run(self, suite: str, suite_code: int, total: int,
            case_fn: Callable[[int, np.random.Generator], Any]) -> SuiteState:
        """
        Run case_fn for every trial index and collect the results.

        case_fn(index, rng) returns a list of case dicts, or a (cases, skipped)
        tuple. Exceptions are logged and recorded as failed trials.

        Args:
            suite: Suite name
            suite_code: Integer mixed into every trial seed
            total: Number of trials
            case_fn: Trial function

        Returns:
            SuiteState: Filled result store
        """
        state = SuiteState(suite, total)
        logger.info(f"Suite '{suite}' starting: {total} trial(s) on {self.thread_count} worker(s)")

        def work(index: int):
            try:
                result = case_fn(index, case_rng(self.seed, suite_code, index))
                if isinstance(result, tuple):
                    cases, skipped = result
                else:
                    cases, skipped = result, 0
                state.set_cases(index, cases, skipped)
            except Exception as e:
                logger.error(f"Suite '{suite}' trial {index} raised: {e}", exc_info=True)
                state.set_error(index, f"{type(e).__name__}: {e}")

        self._start_workers(suite, total, work)
        self._wait()
        snapshot = state.get_snapshot()
        logger.info(
            f"Suite '{suite}' finished: {len(snapshot['cases'])} case(s), "
            f"{snapshot['failures']} failure(s), {snapshot['skipped']} skipped"
        )
        log_run_metrics(f"Suite '{suite}'")
        return state

    def map(self, fn: Callable[[Any], Any], items: Sequence[Any], name: str = "map") -> List[Any]:
        """Apply fn to every item on the workers; results come back in item order.

        The first exception raised by fn is re-raised after all workers finish.
        """
        results: List[Any] = [None] * len(items)
        failures: Dict[int, BaseException] = {}

        def work(index: int):
            try:
                results[index] = fn(items[index])
            except Exception as e:
                failures[index] = e

        self._start_workers(name, len(items), work)
        self._wait()
        if failures:
            raise failures[min(failures)]
        return results

    def stop(self):
        """
        Signal workers to stop and wait for them.

        Waits up to 5 seconds per worker and logs workers that do not exit.
        """
        if not self._workers:
            logger.info("No workers to stop")
            return
        logger.info(f"Stopping {len(self._workers)} worker(s)...")
        self._stop_event.set()
        for thread in self._workers:
            thread.join(timeout=JOIN_TIMEOUT)
            if thread.is_alive():
                logger.warning(f"Worker '{thread.name}' did not stop within {JOIN_TIMEOUT}s timeout")
        self._workers = []
        logger.info("All workers stopped")
