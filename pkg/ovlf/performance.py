#!/usr/bin/env python3
"""
Timing and resource guarding for long-running checks
Tracks per-component latencies and refuses allocations over the symbol cap
"""

import logging
import threading
import time
from collections import deque
from functools import wraps
from typing import Any, Dict

import numpy as np
import psutil

from .config import get_config
from .errors import LimitExceeded

logger = logging.getLogger(__name__)


class PerformanceMetrics:
    """Collect and track latencies per component"""

    def __init__(self, window_size: int = 1000):
        self.window_size = window_size
        self.latencies: Dict[str, deque] = {}
        self.call_count = 0
        self.error_count = 0
        self._lock = threading.Lock()

    def record_latency(self, component: str, latency_ms: float):
        with self._lock:
            if component not in self.latencies:
                self.latencies[component] = deque(maxlen=self.window_size)
            self.latencies[component].append(latency_ms)
            self.call_count += 1

    def record_error(self):
        with self._lock:
            self.error_count += 1

    def last(self, component: str) -> float:
        """Most recent latency in ms for a component, 0.0 if never run"""
        with self._lock:
            data = self.latencies.get(component)
            return data[-1] if data else 0.0

    def get_stats(self) -> Dict[str, Any]:
        """Call counts and per-component latency summaries in ms"""
        with self._lock:
            stats = {
                'total_calls': self.call_count,
                'failed_calls': self.error_count,
                'latencies': {}
            }
            for component, latencies in self.latencies.items():
                if latencies:
                    data = np.fromiter(latencies, dtype=float)
                    p50, p95 = np.percentile(data, [50, 95])
                    stats['latencies'][component] = {
                        'calls': int(data.size),
                        'avg': float(data.mean()),
                        'min': float(data.min()),
                        'max': float(data.max()),
                        'p50': float(p50),
                        'p95': float(p95),
                    }
        return stats


metrics = PerformanceMetrics()


def performance_tracker(component: str):
    """Decorator recording the wall time of each call under `component`"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            except Exception:
                metrics.record_error()
                raise
            finally:
                latency_ms = (time.perf_counter() - start_time) * 1000
                metrics.record_latency(component, latency_ms)
                logger.debug(f"{component} took {latency_ms:.1f} ms")
        return wrapper
    return decorator


class ResourceMonitor:
    """Point-in-time view of process and system memory"""

    def snapshot(self) -> Dict[str, float]:
        try:
            memory = psutil.virtual_memory()
            process = psutil.Process()
            return {
                'memory_available_mb': memory.available / 1024 / 1024,
                'memory_percent': memory.percent,
                'process_memory_mb': process.memory_info().rss / 1024 / 1024,
                'num_threads': process.num_threads(),
            }
        except Exception as e:
            logger.error(f"Error reading resource usage: {e}")
            return {}


resource_monitor = ResourceMonitor()


def check_symbol_budget(n: int, what: str, bytes_per_symbol: float = 1.0) -> None:
    """Raise LimitExceeded if n symbols exceed the configured cap.

    Logs a warning when the estimated allocation is over half the memory
    currently available.
    """
    cap = get_config().memory_cap_symbols
    if n > cap:
        raise LimitExceeded(what, n, cap)
    estimate_mb = n * bytes_per_symbol / 1024 / 1024
    if estimate_mb > 64:
        available = resource_monitor.snapshot().get('memory_available_mb')
        if available is not None and estimate_mb > available / 2:
            logger.warning(f"{what}: ~{estimate_mb:.0f} MB requested, "
                           f"{available:.0f} MB available")


__all__ = [
    'PerformanceMetrics',
    'ResourceMonitor',
    'check_symbol_budget',
    'metrics',
    'performance_tracker',
    'resource_monitor',
]
