"""Memory-access records, the CSV trace format, and synthetic workloads.

A trace is a UTF-8 CSV file with the exact header ``seq,tid,pc,addr,size,op``,
``pc``/``addr`` as 0x-prefixed lowercase hex, ``op`` as ``R`` or ``W`` and LF
line endings. The generator concatenates independently seeded phases so a
single trace exhibits several distinct access archetypes back to back, which
is what makes drift adaptation measurable downstream.
"""

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

TRACE_HEADER = "seq,tid,pc,addr,size,op"

MAX_ACCESS_SIZE = 4096


class Op(IntEnum):
    READ = 0
    WRITE = 1


class TraceError(Exception):
    pass


class MalformedLine(TraceError):
    """A trace line that cannot be decoded; carries its 1-based line number."""

    def __init__(self, lineno, reason):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class InvalidConfig(TraceError):
    pass


class InvalidRate(TraceError):
    pass


@dataclass(slots=True)
class AccessRecord:
    seq: int
    tid: int
    pc: int
    addr: int
    size: int
    op: Op


_OP_CODES = {"R": Op.READ, "W": Op.WRITE}
_OP_LETTER = ("R", "W")


def parse_trace_line(line, lineno=0):
    parts = line.rstrip("\n").split(",")
    if len(parts) != 6:
        raise MalformedLine(lineno, f"expected 6 fields, got {len(parts)}")
    try:
        seq = int(parts[0])
        tid = int(parts[1])
        pc = int(parts[2], 16)
        addr = int(parts[3], 16)
        size = int(parts[4])
    except ValueError as exc:
        raise MalformedLine(lineno, str(exc)) from None
    op = _OP_CODES.get(parts[5])
    if op is None:
        raise MalformedLine(lineno, f"unknown op code {parts[5]!r}")
    if size < 1 or size > MAX_ACCESS_SIZE:
        raise MalformedLine(lineno, f"size {size} outside [1, {MAX_ACCESS_SIZE}]")
    return AccessRecord(seq, tid, pc, addr, size, op)


def format_trace_line(record):
    return (f"{record.seq},{record.tid},0x{record.pc:x},0x{record.addr:x},"
            f"{record.size},{_OP_LETTER[record.op]}")


def read_trace(path):
    """Yield AccessRecords from a trace file, validating the header."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise MalformedLine(1, f"bad header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if line.strip() == "":
                continue
            yield parse_trace_line(line, lineno)


def write_trace(path, records):
    """Write records to ``path`` in the canonical format; returns the count."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER + "\n")
        for rec in records:
            fh.write(format_trace_line(rec) + "\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------

class Pattern(str, Enum):
    SEQUENTIAL = "sequential"
    STRIDED = "strided"
    ZIPF_HOTSPOT = "zipf_hotspot"
    UNIFORM_RANDOM = "uniform_random"


@dataclass(slots=True)
class PhaseSpec:
    pattern: Pattern
    length: int
    working_set_pages: int
    stride_bytes: int | None = None
    zipf_s: float | None = None
    pc_pool: int = 64
    write_ratio: float = 0.3
    access_size: int = 64
    base_addr: int | None = None  # derived from the phase index when None

    def validate(self, index):
        where = f"phase {index}"
        if self.length < 1:
            raise InvalidConfig(f"{where}: length must be >= 1")
        if self.working_set_pages < 1:
            raise InvalidConfig(f"{where}: working_set_pages must be >= 1")
        if self.pattern == Pattern.STRIDED and not self.stride_bytes:
            raise InvalidConfig(f"{where}: strided phase needs stride_bytes")
        if self.pattern == Pattern.ZIPF_HOTSPOT:
            if self.zipf_s is None or self.zipf_s <= 0:
                raise InvalidConfig(f"{where}: zipf_s must be > 0")
        if not 0.0 <= self.write_ratio <= 1.0:
            raise InvalidConfig(f"{where}: write_ratio must be in [0, 1]")
        if self.pc_pool < 1:
            raise InvalidConfig(f"{where}: pc_pool must be >= 1")
        if not 1 <= self.access_size <= MAX_ACCESS_SIZE:
            raise InvalidConfig(f"{where}: access_size outside [1, {MAX_ACCESS_SIZE}]")


@dataclass(slots=True)
class GeneratorConfig:
    phases: list[PhaseSpec] = field(default_factory=list)
    master_seed: int = 0
    page_size_log2: int = 12

    def validate(self):
        if not self.phases:
            raise InvalidConfig("at least one phase is required")
        if not 6 <= self.page_size_log2 <= 30:
            raise InvalidConfig("page_size_log2 outside [6, 30]")
        for i, phase in enumerate(self.phases):
            phase.validate(i)


_BLOCK = 8192
_PC_STAY_PROB = 0.9  # loop-like repetition of the current synthetic pc


def _zipf_cdf(n_pages, s):
    """Cumulative Zipf(s) law over ranks 1..n_pages by direct summation."""
    pmf = np.arange(1, n_pages + 1, dtype=np.float64) ** (-s)
    pmf /= pmf.sum()
    return np.cumsum(pmf)


def _markov_pc(rng, pool, state, n):
    """Next-pc chain: keep the current pool slot w.p. 0.9, else jump."""
    jump = rng.random(n) >= _PC_STAY_PROB
    targets = rng.integers(0, len(pool), size=n)
    pos = np.arange(n)
    last_jump = np.maximum.accumulate(np.where(jump, pos, -1))
    idx = np.where(last_jump >= 0, targets[last_jump], state)
    return pool[idx], int(idx[-1])


def generate_trace(config):
    """Yield AccessRecords for all phases back to back, seq continuous.

    Byte-identical output for identical (config, master_seed): every phase
    draws from its own generator seeded by (master_seed, phase index), and
    all random draws happen in a fixed order per block.
    """
    config.validate()
    page_size = 1 << config.page_size_log2
    seq = 0
    for index, phase in enumerate(config.phases):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence([config.master_seed, index])))
        base = phase.base_addr
        if base is None:
            base = (index + 1) << 32
        ws_bytes = phase.working_set_pages * page_size
        size = phase.access_size
        pc_base = 0x400000 + index * 0x100000
        pc_pool = pc_base + 16 * np.arange(phase.pc_pool, dtype=np.uint64)
        pc_state = 0
        cursor = 0
        offsets_per_page = max(1, page_size // size)
        zipf_cdf = None
        page_perm = None
        if phase.pattern == Pattern.ZIPF_HOTSPOT:
            zipf_cdf = _zipf_cdf(phase.working_set_pages, phase.zipf_s)
            page_perm = rng.permutation(phase.working_set_pages)
        remaining = phase.length
        while remaining > 0:
            n = min(_BLOCK, remaining)
            if phase.pattern == Pattern.SEQUENTIAL:
                addrs = base + (cursor + size * np.arange(n)) % ws_bytes
                cursor = (cursor + size * n) % ws_bytes
            elif phase.pattern == Pattern.STRIDED:
                stride = phase.stride_bytes
                addrs = base + (cursor + stride * np.arange(n)) % ws_bytes
                cursor = (cursor + stride * n) % ws_bytes
            elif phase.pattern == Pattern.ZIPF_HOTSPOT:
                ranks = np.searchsorted(zipf_cdf, rng.random(n), side="right")
                pages = page_perm[np.minimum(ranks, phase.working_set_pages - 1)]
                offs = rng.integers(0, offsets_per_page, size=n) * size
                addrs = base + pages * page_size + offs
            else:  # uniform random
                pages = rng.integers(0, phase.working_set_pages, size=n)
                offs = rng.integers(0, offsets_per_page, size=n) * size
                addrs = base + pages * page_size + offs
            writes = rng.random(n) < phase.write_ratio
            pcs, pc_state = _markov_pc(rng, pc_pool, pc_state, n)
            for i in range(n):
                yield AccessRecord(seq, 0, int(pcs[i]), int(addrs[i]), size,
                                   Op.WRITE if writes[i] else Op.READ)
                seq += 1
            remaining -= n


class TraceBuffer:
    """Whole trace held as columns, cheap to iterate several times.

    Comparing learners replays the same records once per pipeline; column
    storage keeps that affordable for multi-million-record traces.
    """

    __slots__ = ("seq", "tid", "pc", "addr", "size", "op")

    def __init__(self, seq, tid, pc, addr, size, op):
        self.seq = seq
        self.tid = tid
        self.pc = pc
        self.addr = addr
        self.size = size
        self.op = op

    @classmethod
    def from_records(cls, records):
        seq, tid, pc, addr, size, op = [], [], [], [], [], []
        for r in records:
            seq.append(r.seq)
            tid.append(r.tid)
            pc.append(r.pc)
            addr.append(r.addr)
            size.append(r.size)
            op.append(int(r.op))
        return cls(np.array(seq, dtype=np.uint64), np.array(tid, dtype=np.uint32),
                   np.array(pc, dtype=np.uint64), np.array(addr, dtype=np.uint64),
                   np.array(size, dtype=np.uint32), np.array(op, dtype=np.uint8))

    @classmethod
    def from_file(cls, path):
        return cls.from_records(read_trace(path))

    def __len__(self):
        return len(self.seq)

    def records(self):
        ops = (Op.READ, Op.WRITE)
        seq, tid, pc, addr, size, op = (self.seq, self.tid, self.pc,
                                        self.addr, self.size, self.op)
        for i in range(len(seq)):
            yield AccessRecord(int(seq[i]), int(tid[i]), int(pc[i]),
                               int(addr[i]), int(size[i]), ops[op[i]])

    def sampled(self, rate, seed=0):
        if rate == 1.0:
            return self
        return TraceBuffer.from_records(sample_trace(self.records(), rate, seed))


def sample_trace(stream, rate, seed=0):
    """Keep each record independently with probability ``rate``.

    Sequence numbers are preserved, never renumbered. ``rate`` must lie in
    (0, 1]; a rate of exactly 1.0 passes the stream through untouched.
    """
    if not 0.0 < rate <= 1.0:
        raise InvalidRate(f"sampling rate {rate} outside (0, 1]")
    if rate == 1.0:
        yield from stream
        return
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x5A])))
    buf = rng.random(_BLOCK)
    pos = 0
    for rec in stream:
        if pos == _BLOCK:
            buf = rng.random(_BLOCK)
            pos = 0
        keep = buf[pos] < rate
        pos += 1
        if keep:
            yield rec
