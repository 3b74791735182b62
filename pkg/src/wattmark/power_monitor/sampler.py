"""Fixed-interval power sampling that runs alongside a workload.

The sampler takes one sample immediately at startup and then one per
interval, scheduled against trial start (next tick = start + k * interval)
so long trials do not accumulate sleep drift.
"""

from __future__ import annotations

import logging
import math
import threading
import time

from ..errors import ContractViolation, SealedTraceError, TelemetryError, TelemetryReadError
from .backends import TelemetryBackend
from .trace import PowerSample, PowerTrace

log = logging.getLogger(__name__)


class MonotonicClock:
    """Wall clock with interruptible waits; drives real sampling threads."""

    realtime = True

    def now(self) -> float:
        return time.monotonic()

    def wait_until(self, deadline: float, interrupt: threading.Event) -> bool:
        """Block until ``deadline`` or until interrupted; True when interrupted."""
        remaining = deadline - self.now()
        if remaining <= 0:
            return interrupt.is_set()
        return interrupt.wait(remaining)


class SimulatedClock:
    """Deterministic clock for tests and simulated trials.

    Waits complete instantly. Once a deadline falls past the configured
    trial end the clock reports an interrupt, so a simulated trial of
    duration D with interval I records exactly floor(D / I) + 1 samples
    (the startup sample plus one per whole interval).
    """

    realtime = False

    def __init__(self, end_s: float) -> None:
        if not math.isfinite(end_s) or end_s < 0:
            raise ContractViolation(f"end_s must be >= 0, got {end_s!r}")
        self.end_s = float(end_s)
        self._now = 0.0

    def now(self) -> float:
        return self._now

    def wait_until(self, deadline: float, interrupt: threading.Event) -> bool:
        if interrupt.is_set() or deadline > self.end_s:
            self._now = self.end_s
            return True
        self._now = deadline
        return False


class SamplingSession:
    """Handle to one trial's concurrent sampling activity.

    Exactly one producer (this session) appends to the trace; callers may
    read it only after :meth:`stop_and_seal`, which is the synchronization
    point. The handle itself must stay on the thread that created it.
    """

    def __init__(
        self,
        backend: TelemetryBackend,
        interval_s: float,
        clock,
        trial_id: str,
    ) -> None:
        self._backend = backend
        self._interval_s = float(interval_s)
        self._clock = clock
        self._trace = PowerTrace(trial_id, interval_s)
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._skipped_reads = 0
        self._t0 = clock.now()

    @property
    def trial_id(self) -> str:
        return self._trace.trial_id

    @property
    def skipped_reads(self) -> int:
        """Transient read failures tallied after the startup sample."""
        return self._skipped_reads

    def elapsed_ms(self) -> int:
        return max(0, round((self._clock.now() - self._t0) * 1000.0))

    def _take_sample(self) -> bool:
        try:
            watts = self._backend.read_watts()
        except TelemetryReadError as exc:
            self._skipped_reads += 1
            log.warning("skipped power reading for %s: %s", self.trial_id, exc)
            return False
        self._trace.append(PowerSample(elapsed_ms=self.elapsed_ms(), watts=watts))
        return True

    def _run(self) -> None:
        k = 1
        while True:
            deadline = self._t0 + k * self._interval_s
            if self._clock.wait_until(deadline, self._stop):
                return
            self._take_sample()
            k += 1

    def run_to_completion(self) -> None:
        """Drive the sampling loop synchronously; simulated clocks only."""
        if self._clock.realtime:
            raise ContractViolation(
                "run_to_completion is only valid with a simulated clock; "
                "realtime sessions sample on their own thread"
            )
        if self._trace.sealed:
            raise SealedTraceError(f"session {self.trial_id!r} is already sealed")
        self._run()

    def stop_and_seal(self) -> PowerTrace:
        """Stop sampling and return the sealed, immutable trace."""
        if self._trace.sealed:
            raise SealedTraceError(f"session {self.trial_id!r} is already sealed")
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
            self._thread = None
        return self._trace.seal()


def start_sampling(
    backend: TelemetryBackend,
    interval_s: float,
    *,
    clock=None,
    trial_id: str = "trial",
    abort_on_startup_failure: bool = True,
) -> SamplingSession:
    """Begin sampling ``backend`` every ``interval_s`` seconds.

    The startup sample is taken immediately, before this call returns, so
    it always precedes the monitored workload. With a realtime clock a
    daemon thread keeps sampling until :func:`stop_and_seal`; with a
    simulated clock the caller drives the loop via ``run_to_completion``.

    A failed startup sample aborts the trial with :class:`TelemetryError`
    unless ``abort_on_startup_failure`` is False, in which case it is
    tallied like any transient skip.
    """
    if not math.isfinite(interval_s) or interval_s <= 0:
        raise ContractViolation(f"interval_s must be positive, got {interval_s!r}")
    session = SamplingSession(backend, interval_s, clock or MonotonicClock(), trial_id)
    if not session._take_sample() and abort_on_startup_failure:
        raise TelemetryError(
            f"startup power sample failed for trial {trial_id!r}; "
            f"backend {backend.describe()} is unreachable"
        )
    if session._clock.realtime:
        thread = threading.Thread(
            target=session._run, name=f"power-sampler-{trial_id}", daemon=True
        )
        session._thread = thread
        thread.start()
    return session


def stop_and_seal(session: SamplingSession) -> PowerTrace:
    """Stop a session and return its sealed trace (idempotency-checked)."""
    return session.stop_and_seal()
