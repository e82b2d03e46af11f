from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Optional

import matplotlib
import numpy as np

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from pimass.model.models import Algorithm, EstimatorReport, SweepRecord, EmptyRecordsError  # noqa: E402

SVG_HASH_SALT = 'pimass'


def generate_estimate_report(algo: Algorithm, report: EstimatorReport, true_pi: Optional[float] = None) -> str:
    lines = [f'algo={algo}',
             f'estimate={report.estimate:.17g}',
             f'repeats={report.repeats}',
             f'samples={report.samples}',
             f'distinct_samples={report.distinct_samples}',
             f'step_calls={report.step_calls}',
             f'probe_calls={report.probe_calls}',
             f'total_calls={report.total_calls}',
             f'footprint={report.footprint}',
             f'elapsed_s={report.elapsed_s:.3f}']
    if true_pi is not None:
        rel_error = abs(report.estimate - true_pi) / true_pi
        lines.extend([f'true_pi={true_pi:.17g}', f'rel_error={rel_error:.17g}'])
    return '\n'.join(lines) + '\n'


def mean_by_length(records: list[SweepRecord], algo: Algorithm) -> list[tuple[int, float, float]]:
    """(walk_len, mean total calls, mean relative error) per walk length of one algorithm, by length."""
    batches = defaultdict(list)
    for record in records:
        if record.algo is algo:
            batches[record.walk_len].append(record)
    return [(walk_len, float(np.mean([r.total_calls for r in batch])), float(np.mean([r.rel_error for r in batch])))
            for walk_len, batch in sorted(batches.items())]


def cost_to_accuracy(records: list[SweepRecord], algo: Algorithm, threshold: float) -> Optional[float]:
    """Mean query cost at the first walk length whose mean relative error is at most threshold."""
    for _, cost, rel_error in mean_by_length(records, algo):
        if rel_error <= threshold:
            return cost
    return None


def generate_svg_chart(records: list[SweepRecord], path: Path):
    """
    Mean relative error against mean total calls per walk length, one log-log series per algorithm.
    Each series is a group with id 'series-<algo>'; a series with a single point is drawn as a marker only.
    """
    if not records:
        raise EmptyRecordsError('There are no sweep records to plot.')
    algos = sorted({r.algo for r in records}, key=str)
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'path.simplify': False}):
        fig, ax = plt.subplots(figsize=(8, 5.5))
        for algo in algos:
            points = mean_by_length(records, algo)
            costs = [max(cost, 1.0) for _, cost, _ in points]
            errors = [rel_error for _, _, rel_error in points]
            style = {'marker': 'o', 'linestyle': '-' if len(points) > 1 else 'none'}
            ax.plot(costs, errors, label=str(algo), gid=f'series-{algo}', **style)
        ax.set_xscale('log')
        ax.set_yscale('log', nonpositive='clip')
        ax.set_xlabel('total step() and probe() calls')
        ax.set_ylabel('mean relative error')
        ax.grid(True, which='both', alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
