"""
SuiteState - Thread-safe result store for one verification suite.

Worker threads write the cases of each trial into the slot for its index;
the report is assembled from the slots in index order, so the number of
workers never changes the output.
"""

import threading
from typing import Any, Dict, List, Optional


class SuiteState:
    """Thread-safe slot storage for the case records of a suite."""

    def __init__(self, suite: str, total: int):
        """
        Initialize SuiteState with one empty slot per trial.

        Args:
            suite: Suite name written into the report
            total: Number of trial indices the suite will run
        """
        self._lock = threading.Lock()
        self.suite = suite
        self._slots: List[Optional[List[Dict[str, Any]]]] = [None] * total
        self._skipped = [0] * total
        self._errors: Dict[int, str] = {}

    @property
    def total(self) -> int:
        return len(self._slots)

    def set_cases(self, index: int, cases: List[Dict[str, Any]], skipped: int = 0):
        """
        Thread-safe write of the case records for one trial.

        Args:
            index: Trial index
            cases: Case dicts with at least an "ok" key
            skipped: Vacuous cases dropped from this trial (e.g. a zero series)
        """
        with self._lock:
            self._slots[index] = list(cases)
            self._skipped[index] = skipped

    def set_error(self, index: int, message: str):
        """Record a trial that raised; it counts as a failure."""
        with self._lock:
            self._slots[index] = []
            self._errors[index] = message

    def completed(self) -> int:
        with self._lock:
            return sum(slot is not None for slot in self._slots)

    def get_snapshot(self) -> Dict[str, Any]:
        """
        Thread-safe read of all results in index order.

        Returns:
            Dictionary containing:
                - suite: suite name
                - cases: flattened case list
                - failures: count of ok=false cases plus errored trials
                - skipped: vacuous cases
                - errors: list of {"index", "error"}
        """
        with self._lock:
            cases = [case for slot in self._slots if slot for case in slot]
            errors = [{"index": i, "error": self._errors[i]} for i in sorted(self._errors)]
            return {
                "suite": self.suite,
                "cases": cases,
                "failures": sum(not case["ok"] for case in cases) + len(errors),
                "skipped": sum(self._skipped),
                "errors": errors,
            }

    def build_report(self, summary: Optional[Dict[str, Any]] = None,
                     wall_time: Optional[float] = None) -> Dict[str, Any]:
        """SuiteReport dict: suite, cases, failures, skipped, summary, and wall_time when given."""
        report = self.get_snapshot()
        if not report["errors"]:
            del report["errors"]
        report["summary"] = summary or {}
        if wall_time is not None:
            report["wall_time"] = wall_time
        return report
