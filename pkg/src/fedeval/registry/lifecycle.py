"""Association and benchmark state machines.

Associations:  REQUESTED --APPROVE--> APPROVED
               REQUESTED --REJECT--> REJECTED
               (by the owning benchmark's committee; terminal states admit
               no further transition)

Benchmarks:    DRAFT --ACTIVATE--> OPERATIONAL --RETIRE--> RETIRED
               (by a platform operator; monotone, no other edges)

Authorization is checked before state, so an unauthorized caller learns
nothing about the current state from the error code.
"""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime
from enum import Enum
from typing import Iterable

from .errors import DomainError
from .model import (
    Association,
    AssociationState,
    Benchmark,
    BenchmarkState,
    Role,
)


class AssociationAction(str, Enum):
    APPROVE = "APPROVE"
    REJECT = "REJECT"


class BenchmarkAction(str, Enum):
    ACTIVATE = "ACTIVATE"
    RETIRE = "RETIRE"


def transition_association(
    assoc: Association,
    action: AssociationAction,
    actor_id: str,
    roles: Iterable[Role],
    benchmark: Benchmark,
    decided_at: datetime,
) -> Association:
    """Apply a committee decision to an association.

    Raises FORBIDDEN unless the actor holds the COMMITTEE role and chairs
    the association's benchmark; raises ILLEGAL_TRANSITION from terminal
    states.
    """
    if assoc.benchmark_id != benchmark.id:
        raise DomainError(
            "ILLEGAL_TRANSITION",
            f"association {assoc.id} does not belong to benchmark {benchmark.id}",
        )
    if Role.COMMITTEE not in set(roles) or actor_id != benchmark.committee_id:
        raise DomainError(
            "FORBIDDEN", f"{actor_id!r} is not the committee of benchmark {benchmark.id}"
        )
    if assoc.state is not AssociationState.REQUESTED:
        raise DomainError(
            "ILLEGAL_TRANSITION", f"association already decided: {assoc.state.value}"
        )
    new_state = (
        AssociationState.APPROVED
        if action is AssociationAction.APPROVE
        else AssociationState.REJECTED
    )
    return replace(assoc, state=new_state, decided_by=actor_id, decided_at=decided_at)


_BENCHMARK_EDGES = {
    (BenchmarkState.DRAFT, BenchmarkAction.ACTIVATE): BenchmarkState.OPERATIONAL,
    (BenchmarkState.OPERATIONAL, BenchmarkAction.RETIRE): BenchmarkState.RETIRED,
}


def transition_benchmark(
    benchmark: Benchmark,
    action: BenchmarkAction,
    actor_id: str,
    roles: Iterable[Role],
) -> Benchmark:
    """Advance the benchmark lifecycle; platform-operator only."""
    if Role.PLATFORM_OPERATOR not in set(roles):
        raise DomainError("FORBIDDEN", f"{actor_id!r} is not a platform operator")
    new_state = _BENCHMARK_EDGES.get((benchmark.state, action))
    if new_state is None:
        raise DomainError(
            "ILLEGAL_TRANSITION",
            f"no {action.value} transition from {benchmark.state.value}",
        )
    return replace(benchmark, state=new_state)
