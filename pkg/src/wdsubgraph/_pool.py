"""Reader -> bounded queue -> worker pool plumbing shared by every dump pass.

One reader (the calling thread) batches lines and submits them; at most
``queue_depth`` batches are in flight, so the reader blocks once the pool
falls behind. Results come back in completion order; callers merge them
with commutative operations only.
"""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from typing import Any, Callable, Iterable, Iterator

BATCH_BYTES = 1 << 20
BATCH_LINES = 2048

_CONTEXT: Any = None


def _init(context) -> None:
    global _CONTEXT
    _CONTEXT = context


def _run(task, batch):
    return task(_CONTEXT, batch)


def batches(lines: Iterable[bytes], max_bytes: int = BATCH_BYTES, max_lines: int = BATCH_LINES) -> Iterator[list[bytes]]:
    batch: list[bytes] = []
    size = 0
    for line in lines:
        batch.append(line)
        size += len(line)
        if size >= max_bytes or len(batch) >= max_lines:
            yield batch
            batch = []
            size = 0
    if batch:
        yield batch


def map_batches(
    task: Callable[[Any, list[bytes]], Any],
    context: Any,
    lines: Iterable[bytes],
    workers: int = 1,
    queue_depth: int | None = None,
) -> Iterator[Any]:
    """Apply ``task(context, batch)`` to every batch of ``lines``.

    ``task`` must be a module-level function so worker processes can import it.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        for batch in batches(lines):
            yield task(context, batch)
        return
    depth = queue_depth or 2 * workers
    ctx = mp.get_context("forkserver")
    with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_init, initargs=(context,)) as pool:
        pending = set()
        for batch in batches(lines):
            if len(pending) >= depth:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    yield fut.result()
            pending.add(pool.submit(_run, task, batch))
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                yield fut.result()
