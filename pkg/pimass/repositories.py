from __future__ import annotations

import csv
import logging
from pathlib import Path

from pimass.model import models

log = logging.getLogger(__name__)

REAL_FORMAT = '%.17g'
CSV_HEADER = ['algo', 'walk_len', 'trial', 'seed', 'estimate', 'true_pi', 'rel_error', 'step_calls', 'probe_calls',
              'footprint', 'elapsed_ms', 'budget_exhausted']


class ChainFileRepository:
    """Chains as text: a header line 'n m', then one 'u v weight' line per undirected edge."""

    def __init__(self, file_path: Path):
        self.file_path = file_path

    def save(self, chain: models.ReversibleChain):
        if self.file_path.exists():
            raise FileExistsError(f'The file "{self.file_path.name}" already exists!')
        with self.file_path.open('w', encoding='utf-8') as f:
            f.write(f'{chain.n} {chain.m}\n')
            for u, v, weight in chain.edges():
                f.write(f'{u} {v} {REAL_FORMAT % weight}\n')
        log.debug(f'Wrote {chain} to "{self.file_path}".')

    def load(self) -> models.ReversibleChain:
        if not self.file_path.is_file():
            raise FileNotFoundError(f'The given path "{self.file_path}" does not point to an existing file!')
        with self.file_path.open(encoding='utf-8') as f:
            lines = [line.split() for line in f if line.strip()]
        if not lines or len(lines[0]) != 2:
            raise ChainFormatError(f'"{self.file_path.name}" lacks the "n m" header line.')
        try:
            n, m = int(lines[0][0]), int(lines[0][1])
            edges = [(int(u), int(v), float(w)) for u, v, w in lines[1:]]
        except ValueError as e:
            raise ChainFormatError(f'"{self.file_path.name}" contains a malformed line: {e}') from e
        if len(edges) != m:
            raise ChainFormatError(f'"{self.file_path.name}" announces {m} edges but lists {len(edges)}.')
        try:
            return models.ReversibleChain.from_edges(n, edges)
        except models.InvalidChainError as e:
            raise ChainFormatError(f'"{self.file_path.name}" does not describe a valid chain: {e}') from e


class SweepRecordCsvRepository:
    def __init__(self, file_path: Path):
        self.file_path = file_path

    def save(self, records: list[models.SweepRecord]):
        if not records:
            raise models.EmptyRecordsError('There are no sweep records to write.')
        with self.file_path.open('w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_HEADER)
            for r in records:
                writer.writerow([r.algo, r.walk_len, r.trial, r.seed, REAL_FORMAT % r.estimate,
                                 REAL_FORMAT % r.true_pi, REAL_FORMAT % r.rel_error, r.step_calls, r.probe_calls,
                                 r.footprint, r.elapsed_ms, int(r.budget_exhausted)])

    def list(self) -> list[models.SweepRecord]:
        with self.file_path.open(encoding='utf-8', newline='') as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != CSV_HEADER:
                raise ValueError(f'"{self.file_path.name}" is not a sweep record file.')
            return [models.SweepRecord(models.Algorithm(row['algo']), int(row['walk_len']), int(row['trial']),
                                       int(row['seed']), float(row['estimate']), float(row['true_pi']),
                                       float(row['rel_error']), int(row['step_calls']), int(row['probe_calls']),
                                       int(row['footprint']), int(row['elapsed_ms']),
                                       row['budget_exhausted'] == '1') for row in reader]


class ChainFormatError(Exception):
    pass
