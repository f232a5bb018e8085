import dataclasses
import logging
import os
import re
import sys
from typing import List, Optional

import simple_parsing
import yaml

from edsolve.solver import oracle

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "configs")


@dataclasses.dataclass
class SolverConfig:
    # ---------------------------------------------------------------------------
    # Input checks
    # ---------------------------------------------------------------------------
    # If True, inputs with an induced S(1,1,5) are refused (NotS115Free). Otherwise
    # the witness is logged and solving continues; solutions are still verified.
    strict: bool = False
    # Permissive inputs with an induced S(1,1,5): a component the case analysis leaves
    # unsolved is handed to the oracle whole before answering NONE.
    oracle_fallback: bool = True

    # ---------------------------------------------------------------------------
    # Case analysis
    # ---------------------------------------------------------------------------
    enable_branch_a: bool = True
    enable_branch_b: bool = True
    enable_branch_c: bool = True
    # Rules that are only valid under a (v2, v5) hypothesis on S(1,1,5)-free inputs
    hypothesis_rules: bool = True
    # Maximum nesting of branching rules inside one hypothesis
    branch_depth_cap: int = 64
    # Maximum number of distinct (v2, v5) hypotheses per component. None: all of them
    max_candidates: Optional[int] = None
    # Reject a P8-branch solution that contains a 2D-P6/C6 pair
    check_branch_c_consistency: bool = True
    # Run the structural checks on every reduced hypothesis
    assert_lemmas: bool = True

    # ---------------------------------------------------------------------------
    # Oracle
    # ---------------------------------------------------------------------------
    oracle_heuristic: str = simple_parsing.choice(*oracle.HEURISTICS, default="lowest")
    oracle_size_cap: int = oracle.DEFAULT_SIZE_CAP
    oracle_count_cap: int = oracle.DEFAULT_COUNT_CAP

    def __post_init__(self):
        if self.branch_depth_cap < 1:
            raise ValueError(
                f"branch_depth_cap must be positive, got {self.branch_depth_cap}"
            )
        if self.max_candidates is not None and self.max_candidates < 0:
            raise ValueError(
                f"max_candidates must be non-negative, got {self.max_candidates}"
            )
        if self.oracle_size_cap < 1 or self.oracle_count_cap < 1:
            raise ValueError("oracle caps must be positive")
        if self.oracle_count_cap > self.oracle_size_cap:
            raise ValueError(
                f"oracle_count_cap ({self.oracle_count_cap}) cannot exceed "
                f"oracle_size_cap ({self.oracle_size_cap})"
            )

        if not (self.enable_branch_a or self.enable_branch_b or self.enable_branch_c):
            logging.warning("All branches are disabled; only single-vertex solutions will be found.")
        if self.strict and not self.hypothesis_rules:
            logging.warning(
                "hypothesis_rules is off in strict mode; hypotheses are searched without their forcings."
            )
        if self.max_candidates is not None and self.enable_branch_b:
            logging.warning(
                f"Branch B is capped at {self.max_candidates} hypotheses per component; solve may miss solutions."
            )


def fix_hyphens(arg: str):
    return re.sub(r"^--([^=]+)", lambda m: "--" + m.group(1).replace("-", "_"), arg)


def get_solver_config(
    override_sys_args: Optional[List[str]] = None, config_file="default_config.yaml"
) -> SolverConfig:
    """
    Parse the command line arguments and return a SolverConfig object.

    Args:
        override_sys_args: The command line arguments. If None, sys.argv[1:] is used.
            This is mainly useful for testing.
    """
    args = sys.argv[1:] if override_sys_args is None else override_sys_args

    return simple_parsing.parse(
        config_class=SolverConfig,
        config_path=os.path.join(CONFIG_DIR, config_file),
        add_config_path_arg=True,
        args=[fix_hyphens(arg) for arg in args],
    )


def load_solver_config(config_file: str = "default_config.yaml") -> SolverConfig:
    """
    A SolverConfig from a YAML file. A bare file name is looked up in configs/;
    settings missing from the file keep their dataclass defaults.
    """
    if not os.path.dirname(config_file):
        config_file = os.path.join(CONFIG_DIR, config_file)
    with open(config_file, encoding="utf-8") as f:
        values = yaml.safe_load(f) or {}
    known = {f.name for f in dataclasses.fields(SolverConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"{config_file}: unknown solver settings {unknown}")
    return SolverConfig(**values)


def merge_solver_config(
    flags: SolverConfig, config_file: str = "default_config.yaml"
) -> SolverConfig:
    """
    The settings in `config_file`, with every flag that differs from its dataclass
    default applied on top.
    """
    defaults = SolverConfig()
    overrides = {
        f.name: getattr(flags, f.name)
        for f in dataclasses.fields(SolverConfig)
        if getattr(flags, f.name) != getattr(defaults, f.name)
    }
    return dataclasses.replace(load_solver_config(config_file), **overrides)
