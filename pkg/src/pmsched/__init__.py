"""Parallel machine scheduling with precedence constraints and setup times."""

from .model import (ContractError, Criterion, Instance, PartialSchedule, Schedule, decode_ect,
                    evaluate, extend, ready_jobs, validate_instance)

__all__ = ["ContractError", "Criterion", "Instance", "PartialSchedule", "Schedule", "decode_ect",
           "evaluate", "extend", "ready_jobs", "validate_instance"]
__version__ = "0.1.0"
