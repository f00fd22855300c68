import json
import os
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

import psutil

LATENCY_LOG = os.getenv("NCW_LATENCY_LOG", "latency_log.jsonl")
LOG_TIMINGS = os.getenv("NCW_LOG_TIMINGS", "0") == "1"


@contextmanager
def timer(record: Dict[str, Any], name: str) -> Iterator[Dict[str, Any]]:
    """Fills record[f"{name}_ms"] (wall clock) and record[f"{name}_cpu_ms"] on exit, also on error."""
    wall, cpu = time.perf_counter_ns(), time.process_time_ns()
    try:
        yield record
    finally:
        record[f"{name}_ms"] = round((time.perf_counter_ns() - wall) / 1e6, 3)
        record[f"{name}_cpu_ms"] = round((time.process_time_ns() - cpu) / 1e6, 3)


def rss_mb() -> float:
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


def log_event(event: str, record: Dict[str, Any], path: Optional[str] = None) -> None:
    """Append one JSON line to the latency log."""
    with open(path or LATENCY_LOG, "a", encoding="utf-8") as f:
        f.write(json.dumps({"event": event, **record}) + "\n")
