import json
import logging
from dataclasses import asdict
from typing import Dict, Optional

import redis

from app.config.settings import get_settings
from app.models.entities import ClassGroupData

logger = logging.getLogger(__name__)


class ClassGroupCache:
    """
    Class-group results keyed by discriminant.

    The memory backend is populated by a single writer and read afterwards;
    the redis backend stores JSON values with a TTL.
    """

    def __init__(self, backend: Optional[str] = None, redis_url: Optional[str] = None):
        settings = get_settings()
        self.backend = backend or settings.cache_backend
        self.ttl_seconds = settings.cache_ttl_seconds
        self._memory: Dict[str, str] = {}
        self.redis_client = None
        if self.backend == "redis":
            self.redis_client = redis.from_url(redis_url or settings.redis_url, decode_responses=True)
        elif self.backend != "memory":
            raise ValueError(f"unknown cache backend {self.backend!r}")

    @staticmethod
    def key(disc: int) -> str:
        return f"classgroup:{disc}"

    def get(self, disc: int) -> Optional[ClassGroupData]:
        """Retrieve a cached class group, or None on a miss."""
        if self.redis_client is not None:
            try:
                cached = self.redis_client.get(self.key(disc))
            except redis.RedisError as exc:
                logger.warning(f"Redis read failed for disc {disc}: {exc}")
                return None
        else:
            cached = self._memory.get(self.key(disc))
        if not cached:
            return None
        return _decode(json.loads(cached))

    def set(self, data: ClassGroupData) -> None:
        payload = json.dumps(asdict(data), sort_keys=True)
        if self.redis_client is not None:
            try:
                self.redis_client.setex(self.key(data.disc), self.ttl_seconds, payload)
            except redis.RedisError as exc:
                logger.warning(f"Redis write failed for disc {data.disc}: {exc}")
            return
        self._memory[self.key(data.disc)] = payload

    def delete(self, disc: int) -> None:
        """Invalidate cache entry."""
        if self.redis_client is not None:
            self.redis_client.delete(self.key(disc))
        else:
            self._memory.pop(self.key(disc), None)

    def clear(self) -> None:
        self._memory.clear()

    def health_check(self) -> bool:
        """Check the backend is reachable."""
        if self.redis_client is None:
            return True
        try:
            self.redis_client.ping()
            return True
        except Exception:
            return False


def _decode(payload: Dict) -> ClassGroupData:
    payload["elementary_divisors"] = tuple(payload["elementary_divisors"])
    return ClassGroupData(**payload)


_cache: Optional[ClassGroupCache] = None


def get_cache() -> ClassGroupCache:
    global _cache
    if _cache is None or _cache.backend != get_settings().cache_backend:
        _cache = ClassGroupCache()
    return _cache
