"""Measure gaze-ingestion retention at a high sampling rate.

A producer generates mock gazes inside the editor viewport, resolves each
(x, y) to (line, col) on the hot path, and hands samples to an async writer
over a bounded queue. Retention = persisted / sent. The second run caps the
queue at one slot and slows the writer to show how backpressure surfaces as
counted drops rather than producer stalls.

Run from the repository root:  python demos/04_ingestion_benchmark.py
(a few seconds of real-time sampling)
"""

import tempfile
from pathlib import Path

from gazetrace import BenchConfig, run_benchmark

workdir = Path(tempfile.mkdtemp(prefix="gaze_bench_"))

print("=== 1000 Hz for 3 s, healthy pipeline ===")
report = run_benchmark(BenchConfig(
    rate_hz=1000, duration_s=3, output=workdir / "healthy.jsonl", rng_seed=7,
))
print(report.human_table())

print("\n=== 2000 Hz for 1 s, queue capacity 1, writer slowed to ~250 samples/s ===")
report = run_benchmark(BenchConfig(
    rate_hz=2000, duration_s=1, output=workdir / "saturated.jsonl",
    queue_capacity=1, write_batch=1, consumer_sleep_s=0.004, rng_seed=7,
))
print(report.human_table())
print(f"\npersisted streams kept under {workdir}")
