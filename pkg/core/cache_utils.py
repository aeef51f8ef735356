"""
Cache utilities for robosoccer.
Memoizes pure, deterministic functions (field geometry) in the Django cache.
"""

from django.core.cache import caches
from functools import wraps
import hashlib
import json
import logging

logger = logging.getLogger(__name__)

# Cache aliases
DEFAULT_CACHE = 'default'
STATIC_CACHE = 'static_data'

TIMEOUT_FOREVER = None


def cache_key_generator(prefix, *args, **kwargs):
    """Generate a consistent cache key from prefix and arguments."""
    key_data = {
        'args': args,
        'kwargs': sorted(kwargs.items())
    }
    key_string = json.dumps(key_data, sort_keys=True, default=repr)
    key_hash = hashlib.md5(key_string.encode()).hexdigest()
    return f"{prefix}:{key_hash}"


def cached_function(timeout=TIMEOUT_FOREVER, cache_alias=STATIC_CACHE, prefix=None):
    """
    Decorator to cache results of a pure function.

    Arguments must have a stable ``repr`` (frozen dataclasses do).

    Args:
        timeout: Cache timeout in seconds (None keeps entries until evicted)
        cache_alias: Which cache to use
        prefix: Cache key prefix (defaults to function name)
    """
    def decorator(func):
        key_prefix = prefix or f"func:{func.__module__}.{func.__name__}"

        @wraps(func)
        def wrapper(*args, **kwargs):
            cache_instance = caches[cache_alias]
            cache_key = cache_key_generator(key_prefix, *args, **kwargs)

            result = cache_instance.get(cache_key)
            if result is not None:
                return result

            result = func(*args, **kwargs)
            cache_instance.set(cache_key, result, timeout)
            logger.debug(f"Cache set for {cache_key}")
            return result

        def cache_clear():
            caches[cache_alias].clear()

        wrapper.cache_clear = cache_clear
        wrapper.cache_key = lambda *args, **kwargs: cache_key_generator(key_prefix, *args, **kwargs)
        wrapper.uncached = func
        return wrapper
    return decorator
