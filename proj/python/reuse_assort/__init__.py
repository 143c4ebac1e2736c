"""Assortment policies for reusable products with finite inventory."""

from ._core import (
    Instance,
    LpSolution,
    MCStats,
    Prepared,
    ReuseAssortError,
    epsilon_star,
    find_solution_violation,
    full_enumeration_lp,
    gen_ec8,
    gen_ec21,
    gen_footnote9,
    policy_names,
    ratio_curve,
    run_canonical_suite,
    run_experiment,
    solve_expected_lp,
    validate_instance_file,
)

__all__ = [
    "Instance",
    "LpSolution",
    "MCStats",
    "Prepared",
    "ReuseAssortError",
    "epsilon_star",
    "find_solution_violation",
    "full_enumeration_lp",
    "gen_ec8",
    "gen_ec21",
    "gen_footnote9",
    "policy_names",
    "ratio_curve",
    "run_canonical_suite",
    "run_experiment",
    "solve_expected_lp",
    "validate_instance_file",
]
