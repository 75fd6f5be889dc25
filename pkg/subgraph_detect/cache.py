# subgraph_detect/cache.py
from collections import OrderedDict
from typing import Any, Callable, Optional


class LRUCache:
    """Bounded mapping with least-recently-used eviction.

    The diagram sweep keys null calibrations by a digest of (test, N, p0, level,
    R, seed), so every lambda1 cell of a row reuses one calibration.
    """

    def __init__(self, capacity: int = 64):
        self.capacity = max(1, capacity)
        self._store: "OrderedDict[str, Any]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def get(self, key: str) -> Optional[Any]:
        if key in self._store:
            # refresh LRU
            self._store.move_to_end(key)
            self.hits += 1
            return self._store[key]
        self.misses += 1
        return None

    def set(self, key: str, value: Any) -> None:
        self._store[key] = value
        self._store.move_to_end(key)
        while len(self._store) > self.capacity:
            self._store.popitem(last=False)

    def get_or_compute(self, key: str, compute: Callable[[], Any]) -> Any:
        value = self.get(key)
        if value is None:
            value = compute()
            self.set(key, value)
        return value

    def __len__(self) -> int:
        return len(self._store)

    def __contains__(self, key: str) -> bool:
        return key in self._store
