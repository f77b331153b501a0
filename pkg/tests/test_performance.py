"""Caching and concurrency tests."""

import time

import numpy as np
import pytest

from app.config import settings
from app.models.domain import GreenQuery
from app.services.decay import decay_service
from app.services.parametrix import parametrix_service
from app.services.specfun import airy_service


class TestPerformance:
    """Test caches and thread-pool determinism."""

    def test_big_l_caching(self):
        """Repeated scalar evaluations of L hit the cache."""
        omega = 7.123456789
        airy_service.big_l(omega)
        hits = airy_service.get_cache_info()["big_l"]["hits"]
        start_time = time.time()
        first = airy_service.big_l(omega)
        second = airy_service.big_l(omega)
        duration = time.time() - start_time

        assert first == second
        assert airy_service.get_cache_info()["big_l"]["hits"] >= hits + 2
        assert duration < 0.1

    def test_shared_table(self):
        """Smaller tables are prefixes of the shared one."""
        small = airy_service.airy_table(5)
        large = airy_service.airy_table(40)
        assert large.zeros[:5] == small.zeros
        assert airy_service.get_cache_info()["table_size"] >= 40

    def test_threaded_scan_is_deterministic(self):
        """A decay curve does not depend on the number of workers."""
        t_values = [1.0, 2.0, 3.0, 4.0]
        grid = lambda t: (np.linspace(0.0, 1.0, 5), np.linspace(-1.0, 0.0, 5))
        evaluator = lambda t, x, y: np.outer(np.cos(t * x), np.sin(t * y) + 2.0)
        saved = settings.threads
        try:
            settings.threads = 1
            serial = decay_service.decay_curve(evaluator, t_values, grid)
            settings.threads = 4
            threaded = decay_service.decay_curve(evaluator, t_values, grid)
        finally:
            settings.threads = saved
        assert serial.sup_values == threaded.sup_values
        assert serial.argmax_points == threaded.argmax_points

    def test_threaded_wave_packets_are_deterministic(self):
        """Wave packets summed in a pool match the serial values exactly."""
        q = GreenQuery(m=0, h=2.0 ** -7, a=0.25, gamma=0.25, t=1.0, x=0.25, y=-1.1)
        saved = settings.threads
        try:
            settings.threads = 1
            serial = parametrix_service.wave_packets(q, range(-2, 3))
            settings.threads = 3
            threaded = parametrix_service.wave_packets(q, range(-2, 3))
        finally:
            settings.threads = saved
        assert np.array_equal(serial, threaded)

    async def test_async_wave_sum(self):
        """The async reflected sum returns the same value as the sync one."""
        q = GreenQuery(m=0, h=2.0 ** -7, a=0.25, gamma=0.25, t=1.0, x=0.25, y=-1.1, tol=1e-4)
        value = await parametrix_service.sum_reflected_async(q)
        assert value == pytest.approx(parametrix_service.sum_reflected(q))
