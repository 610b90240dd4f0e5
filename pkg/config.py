"""
config.py
---------
Run configuration for the volterra-lattice verification harness.

This module defines the defaults for every suite the command line can run:
the identity suites over random polynomials, the norm-inequality suites, and
the ideal/subspace tooling. Command-line flags override individual keys.

Configuration Options:
----------------------

Run Parameters:
- seed: Base seed for every random stream. Each case draws from its own
  stream derived from (seed, suite, case index), so thread count never
  changes results.
  Default: 42

- trunc_degree: Truncation degree N of the sampled series
  Default: 45 (random degrees fall in [0, trunc_degree - n_max])

- n_max: Largest operator order n exercised by the identity suites
  Default: 5

- trials: Random polynomials per suite and per n
  Default: 200

- tol: Comparison tolerance; 0.0 selects the mode default. A positive value
  also replaces the tol of an ideal spec for the ideal and subspace commands
  (exact zero residual in rational mode, 1e-12 relative in float mode)

- mode: Scalar mode, "rational" (exact) or "float"
  Default: "rational"

Output and Runtime:
- output: Report path; None writes the report to stdout
- threads: Worker threads; None uses the CPU count. The VL_THREADS
  environment variable caps this value.
- include_timing: Add wall_time to reports. Off by default so that reports
  from the same seed are byte-identical.
- corrupt_operator: Harness self-test that perturbs one matrix entry; the
  identity suite must then report failures.

Lattice Parameters:
- membership_tol, heuristic_tol: tolerances for exact-style and heuristic
  verdicts
- quad_points, quad_levels, divergence_drop_factor: Carleson quadrature
  grid, number of doublings and divergence threshold
"""

import os

# Environment variable capping the worker count
THREADS_ENV = "VL_THREADS"

# Default configuration for verification runs
# Command-line flags override these values
RUN_CONFIG = {
    # ===== Run Parameters =====
    # Same seed + same config => byte-identical report
    "seed": 42,

    # Truncation degree of sampled series
    # Must leave room for n_max extra degrees (see validate_config)
    "trunc_degree": 45,

    # Operator orders 1..n_max are exercised
    "n_max": 5,

    # Random polynomials per suite and per operator order
    "trials": 200,

    # 0.0 selects the mode default tolerance
    "tol": 0.0,

    # "rational": exact Fraction arithmetic, zero residuals expected
    # "float": IEEE doubles, relative residuals compared against tol
    "mode": "rational",

    # ===== Output and Runtime =====
    # None writes the JSON report to stdout
    "output": None,

    # None uses psutil's CPU count (capped by VL_THREADS)
    "threads": None,

    # Timing breaks byte-identical reports, so it is opt-in
    "include_timing": False,

    # Harness sensitivity self-test
    "corrupt_operator": False,

    # ===== Norm Suites =====
    # Boundary samples for the sup-norm estimate
    "grid_size": 4096,

    # Nesting and derivative-bound levels k = 1..nesting_k_max
    "nesting_k_max": 4,

    # Product bound levels n = 1..submult_n_max
    "submult_n_max": 3,

    # Degree caps for single polynomials and for product pairs
    "norm_degree_max": 30,
    "pair_degree_max": 20,

    # ===== Ideals and Subspaces =====
    # Tolerance for membership conditions on atom-free specs
    "membership_tol": 1e-9,

    # Tolerance for heuristic verdicts (atoms, S_n^2 tail stability)
    "heuristic_tol": 1e-4,

    # Working truncation multiplier when singular atoms are present
    "atom_truncation_factor": 2,

    # Carleson quadrature: base grid, doublings, divergence threshold
    "quad_points": 256,
    "quad_levels": 3,
    "divergence_drop_factor": 1.5,

    # Nodes closer than this to K are flagged as collisions
    "collision_radius": 1e-14,
}


def get_config():
    """
    Returns a copy of the run configuration with environment overrides applied.

    VL_THREADS, when set to a positive integer, caps the worker count.

    Returns:
        dict: Configuration dictionary
    """
    config = RUN_CONFIG.copy()
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            config["threads_cap"] = max(1, int(cap))
        except ValueError:
            config["threads_cap"] = None
    return config


def validate_config(config):
    """
    Validates the configuration dictionary.

    Checks for:
    - seed >= 0
    - trials >= 1
    - trunc_degree >= n_max + 2
    - mode in {"float", "rational"}
    - tol >= 0
    - threads >= 1 when given
    - positive grid and quadrature sizes

    Args:
        config: Configuration dictionary to validate

    Returns:
        tuple: (is_valid, list_of_problems)
    """
    problems = []

    seed = config.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        problems.append(f"seed must be a non-negative integer, got {seed!r}")

    trials = config.get("trials", 1)
    if not isinstance(trials, int) or trials < 1:
        problems.append(f"trials must be a positive integer, got {trials!r}")

    n_max = config.get("n_max", 1)
    if not isinstance(n_max, int) or n_max < 1:
        problems.append(f"n_max must be a positive integer, got {n_max!r}")

    trunc_degree = config.get("trunc_degree", 0)
    if not isinstance(trunc_degree, int):
        problems.append(f"trunc_degree must be an integer, got {trunc_degree!r}")
    elif isinstance(n_max, int) and trunc_degree < n_max + 2:
        problems.append(
            f"trunc_degree ({trunc_degree}) must be at least n_max + 2 ({n_max + 2})"
        )

    mode = config.get("mode")
    if mode not in ("float", "rational"):
        problems.append(f"Unknown mode '{mode}'. Use 'float' or 'rational'.")

    tol = config.get("tol", 0.0)
    if not isinstance(tol, (int, float)) or not tol >= 0:
        problems.append(f"tol must be non-negative, got {tol!r}")

    threads = config.get("threads")
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        problems.append(f"threads must be a positive integer, got {threads!r}")

    if "threads_cap" in config and config["threads_cap"] is None:
        problems.append(f"{THREADS_ENV} must be a positive integer")

    grid_size = config.get("grid_size", 4096)
    if not isinstance(grid_size, int) or grid_size < 16:
        problems.append(f"grid_size must be an integer >= 16, got {grid_size!r}")

    quad_points = config.get("quad_points", 256)
    if not isinstance(quad_points, int) or quad_points < 256:
        problems.append(f"quad_points must be an integer >= 256, got {quad_points!r}")

    is_valid = len(problems) == 0
    return is_valid, problems
