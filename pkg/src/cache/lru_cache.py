"""
Thread-safe memo caches
Bounded LRU memo for derived operator tables, and the append-only tau-basis store
"""
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Optional, Sequence, Tuple

import structlog

from models.polynomial import Polynomial

logger = structlog.get_logger(__name__)


@dataclass
class CacheEntry:
    """Represents a cache entry with usage metadata"""
    value: Any
    access_count: int = 1

    def touch(self):
        self.access_count += 1


class LRUCache:
    """
    Thread-safe LRU memo keyed by any hashable value
    Used for kernel Taylor tables and repeated D-power chains
    """

    def __init__(self, max_size: int = 4096, name: str = "lru"):
        if max_size < 1:
            raise ValueError(f"max_size must be positive, got {max_size}")
        self.max_size = max_size
        self.name = name

        self._cache: "OrderedDict[Hashable, CacheEntry]" = OrderedDict()
        self._lock = threading.RLock()

        # Metrics
        self.hit_count = 0
        self.miss_count = 0
        self.eviction_count = 0

    def get(self, key: Hashable) -> Optional[Any]:
        """Retrieve value from cache"""
        with self._lock:
            entry = self._cache.get(key)
            if entry is None:
                self.miss_count += 1
                return None

            self._cache.move_to_end(key)
            entry.touch()
            self.hit_count += 1
            return entry.value

    def put(self, key: Hashable, value: Any) -> None:
        """Store value in cache"""
        with self._lock:
            if key in self._cache:
                del self._cache[key]
            self._cache[key] = CacheEntry(value=value)

            while len(self._cache) > self.max_size:
                self._cache.popitem(last=False)
                self.eviction_count += 1

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """Return the cached value, computing and storing it on a miss"""
        value = self.get(key)
        if value is None:
            value = compute()
            self.put(key, value)
        return value

    def clear(self) -> None:
        """Clear all cache entries"""
        with self._lock:
            self._cache.clear()
            self.hit_count = 0
            self.miss_count = 0
            self.eviction_count = 0

    def size(self) -> int:
        return len(self._cache)

    def hit_rate(self) -> float:
        total_requests = self.hit_count + self.miss_count
        if total_requests == 0:
            return 0.0
        return self.hit_count / total_requests

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics"""
        with self._lock:
            return {
                'name': self.name,
                'size': len(self._cache),
                'max_size': self.max_size,
                'hit_count': self.hit_count,
                'miss_count': self.miss_count,
                'hit_rate': self.hit_rate(),
                'eviction_count': self.eviction_count,
            }


class TauCache:
    """
    Append-only store of the tau basis.

    Entries are kept in an immutable tuple; an extension builds the longer
    tuple under the lock and publishes it in one assignment, so readers
    always see a complete prefix.
    """

    def __init__(self, seed: Sequence[Polynomial], step: Callable[[Polynomial, int], Polynomial]):
        if len(seed) < 2:
            raise ValueError("tau cache needs tau_0 and tau_1 as seed")
        self._snapshot: Tuple[Polynomial, ...] = tuple(seed)
        self._step = step
        self._lock = threading.Lock()
        self.extension_count = 0
        self.hit_count = 0

    def get(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError(f"tau index must be non-negative, got {n}")
        snapshot = self._snapshot
        if n < len(snapshot):
            with self._lock:
                self.hit_count += 1
            return snapshot[n]
        return self._extend(n)[n]

    def snapshot(self, n: int) -> Tuple[Polynomial, ...]:
        """tau_0 .. tau_n as one consistent tuple"""
        snapshot = self._snapshot
        if n >= len(snapshot):
            snapshot = self._extend(n)
        return snapshot[: n + 1]

    def _extend(self, n: int) -> Tuple[Polynomial, ...]:
        with self._lock:
            entries = list(self._snapshot)
            start = len(entries)
            while len(entries) <= n:
                k = len(entries) - 1
                entries.append(self._step(entries[k], k))
            if len(entries) > start:
                self._snapshot = tuple(entries)
                self.extension_count += 1
                logger.debug("tau_cache_extended", size=len(entries))
            return self._snapshot

    def size(self) -> int:
        return len(self._snapshot)

    def get_stats(self) -> Dict[str, Any]:
        return {
            'name': 'tau',
            'size': len(self._snapshot),
            'hit_count': self.hit_count,
            'extension_count': self.extension_count,
        }
