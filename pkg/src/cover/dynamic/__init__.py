"""Instrumenting interpreter and trace checker."""

from .checker import check_trace
from .interpreter import Address, interpret
from .trace import (
    AllocEvent,
    ApiCall,
    Counters,
    Free,
    MemRead,
    MemWrite,
    Trace,
    TraceArg,
    dumps,
    loads,
    read_trace,
    write_trace,
)


def run_dynamic(program, table, *, case="", gmap=None, consts=None, deadline=None, max_steps=1_000_000):
    """Interpret ``program`` and check its trace; returns ``(report, trace)``."""
    _, trace = interpret(program, table, gmap=gmap, consts=consts, deadline=deadline, max_steps=max_steps)
    order = {f.name: i for i, f in enumerate(program.functions)}
    report = check_trace(trace, table, case=case, order=order)
    c = trace.counters
    report.info.update(
        api_calls=c.api_calls, mem_events=c.mem_events, suppressed_metadata_events=c.suppressed_metadata_events
    )
    return report, trace


__all__ = [
    "Address", "AllocEvent", "ApiCall", "Counters", "Free", "MemRead", "MemWrite", "Trace", "TraceArg",
    "check_trace", "dumps", "interpret", "loads", "read_trace", "run_dynamic", "write_trace",
]
