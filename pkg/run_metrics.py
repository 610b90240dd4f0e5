"""
run_metrics.py
--------------
Process metrics for suite runs, collected with psutil.

Metrics are logged alongside suite lifecycle events and never enter the JSON
reports, which must stay byte-identical across runs.
"""

import logging
from typing import Any, Dict, Optional

import psutil

logger = logging.getLogger(__name__)


def default_thread_count(threads: Optional[int] = None, cap: Optional[int] = None) -> int:
    """
    Worker count for a suite run.

    Args:
        threads: Configured thread count, or None for the logical CPU count
        cap: Upper bound from the VL_THREADS environment variable, if set

    Returns:
        int: At least 1
    """
    count = threads if threads is not None else (psutil.cpu_count(logical=True) or 1)
    if cap is not None:
        count = min(count, cap)
    return max(1, count)


def collect_run_metrics() -> Dict[str, Any]:
    """
    Collect CPU and memory usage of the current process.

    Returns:
        Dictionary containing:
            - cpu_percent: system-wide CPU usage since the previous call
            - rss_mb: resident memory of this process in MB
            - num_threads: threads in this process
    """
    metrics = {"cpu_percent": 0.0, "rss_mb": 0.0, "num_threads": 0}
    try:
        process = psutil.Process()
        metrics["cpu_percent"] = psutil.cpu_percent(interval=None)
        metrics["rss_mb"] = process.memory_info().rss / (1024 * 1024)
        metrics["num_threads"] = process.num_threads()
    except (psutil.Error, OSError) as e:
        logger.debug(f"Run metrics unavailable: {e}")
    return metrics


def log_run_metrics(label: str):
    metrics = collect_run_metrics()
    logger.info(
        f"{label}: cpu {metrics['cpu_percent']:.1f}%, "
        f"rss {metrics['rss_mb']:.1f} MB, threads {metrics['num_threads']}"
    )
