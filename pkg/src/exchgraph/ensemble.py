"""Sampling of exchangeable random directed graphs as bit-packed matrices.

A graph on n nodes is stored as its m x n adjacency matrix: row i lists the
out-edges of sender i, column j the in-edges of receiver j.  Rows are filled
independently given their biases theta_i, which are drawn according to the
ensemble variant:

* ``partially_exchangeable``: theta_i iid from the mixing law;
* ``completely_exchangeable``: one theta shared by every row;
* ``hierarchical``: one cutoff draw shared by all rows, then iid theta_i from
  the power-law slice at that cutoff.

Row filling uses two distributionally identical paths: a vectorized

Bernoulli pass for dense rows, and geometric gap-skipping for sparse rows so
a row costs O(n theta) instead of O(n).  Matrices are packed 64 columns per
word, little-endian within the word, and padding bits above column n-1 are
kept at zero so word-level equality is matrix equality.
"""

from __future__ import annotations

import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._numerics import spawn_rng, stream_seed
from .errors import ConfigError, ParameterError
from .mixing import (MixingSpec, HierarchicalMixing, ModulatedPowerLawMixing,
                     PowerLawMixing, log_row_prob, mixing_from_json, sample_thetas)

__all__ = [
    "BitMatrix",
    "RowRule",
    "SquareRows",
    "FractionRows",
    "PowerFractionRows",
    "LogFractionRows",
    "ExplicitRows",
    "EnsembleConfig",
    "GraphSample",
    "resolve_rows",
    "sample_graph",
    "sample_bias_matrix",
    "out_degrees",
    "in_degrees",
    "row_prob",
    "map_replicas",
    "write_edge_list",
    "read_edge_list",
    "write_bitmatrix",
    "read_bitmatrix",
    "row_rule_from_json",
]

_MAGIC = b"XGB1"

# Rows with theta below this go through geometric gap-skipping.
_GEOMETRIC_THRESHOLD = 0.05


class BitMatrix:
    """m x n binary matrix packed 64 columns per little-endian word."""

    __slots__ = ("m", "n", "words")

    def __init__(self, m: int, n: int, words: np.ndarray | None = None):
        if m < 0 or n < 0:
            raise ParameterError("matrix dimensions must be nonnegative")
        self.m = int(m)
        self.n = int(n)
        w = (self.n + 63) // 64
        if words is None:
            self.words = np.zeros((self.m, w), dtype=np.uint64)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64)
            if words.shape != (self.m, w):
                raise ParameterError(
                    f"expected word array of shape {(self.m, w)}, got {words.shape}")
            self.words = words
            self._mask_padding()

    @property
    def words_per_row(self) -> int:
        return self.words.shape[1]

    def _mask_padding(self) -> None:
        rem = self.n % 64
        if rem and self.words.shape[1]:
            mask = np.uint64((1 << rem) - 1)
            self.words[:, -1] &= mask

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "BitMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ParameterError("dense input must be 2-D")
        m, n = dense.shape
        out = cls(m, n)
        if n == 0 or m == 0:
            return out
        bits = (dense != 0).astype(np.uint8)
        packed = np.packbits(bits, axis=1, bitorder="little")
        padded = np.zeros((m, out.words_per_row * 8), dtype=np.uint8)
        padded[:, : packed.shape[1]] = packed
        out.words = padded.view("<u8").reshape(m, out.words_per_row).astype(np.uint64)
        return out

    def to_dense(self) -> np.ndarray:
        if self.m == 0 or self.n == 0:
            return np.zeros((self.m, self.n), dtype=np.uint8)
        by = self.words.astype("<u8").view(np.uint8).reshape(self.m, -1)
        bits = np.unpackbits(by, axis=1, bitorder="little")
        return bits[:, : self.n]

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"entry ({i}, {j}) outside {self.m} x {self.n}")
        return int((self.words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def set(self, i: int, j: int, value: int = 1) -> None:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"entry ({i}, {j}) outside {self.m} x {self.n}")
        bit = np.uint64(1) << np.uint64(j & 63)
        if value:
            self.words[i, j >> 6] |= bit
        else:
            self.words[i, j >> 6] &= ~bit

    def row_sums(self) -> np.ndarray:
        if self.words.size == 0:
            return np.zeros(self.m, dtype=np.int64)
        return np.bitwise_count(self.words).sum(axis=1).astype(np.int64)

    def col_sums(self, chunk: int = 512) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for lo in range(0, self.m, chunk):
            hi = min(lo + chunk, self.m)
            by = self.words[lo:hi].astype("<u8").view(np.uint8).reshape(hi - lo, -1)
            bits = np.unpackbits(by, axis=1, bitorder="little")[:, : self.n]
            out += bits.sum(axis=0, dtype=np.int64)
        return out

    def count_ones(self) -> int:
        if self.words.size == 0:
            return 0
        return int(np.bitwise_count(self.words).sum())

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.m, self.n, self.words.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.m == other.m and self.n == other.n
                and bool(np.array_equal(self.words, other.words)))

    def __repr__(self) -> str:
        return f"BitMatrix(m={self.m}, n={self.n}, ones={self.count_ones()})"


# ---------------------------------------------------------------------------
# row-count rules


class RowRule:
    kind = "abstract"

    def resolve(self, n: int, mixing: MixingSpec) -> int:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SquareRows(RowRule):
    kind = "square"

    def resolve(self, n, mixing):
        return n

    def to_json(self):
        return {"kind": "square"}


@dataclass(frozen=True)
class FractionRows(RowRule):
    """m = floor(delta * n) with delta in (0, 1]."""

    delta: float
    kind = "fraction"

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise ConfigError("fraction row rule needs delta in (0, 1]")

    def resolve(self, n, mixing):
        return math.floor(self.delta * n)

    def to_json(self):
        return {"kind": "fraction", "delta": self.delta}


@dataclass(frozen=True)
class PowerFractionRows(RowRule):
    """m = floor(delta * n**(beta - 1)); beta comes from the mixing family."""

    delta: float
    kind = "power_fraction"

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError("power fraction row rule needs delta > 0")

    def resolve(self, n, mixing):
        if not isinstance(mixing, (PowerLawMixing, ModulatedPowerLawMixing)):
            raise ConfigError(
                "power fraction row rule needs a mixing family with a beta exponent")
        return math.floor(self.delta * n ** (mixing.beta - 1.0))

    def to_json(self):
        return {"kind": "power_fraction", "delta": self.delta}


@dataclass(frozen=True)
class LogFractionRows(RowRule):
    """m = floor(delta * n / log n); needs n >= 2."""

    delta: float
    kind = "log_fraction"

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigError("log fraction row rule needs delta > 0")

    def resolve(self, n, mixing):
        if n < 2:
            raise ConfigError("log fraction row rule needs n >= 2")
        return math.floor(self.delta * n / math.log(n))

    def to_json(self):
        return {"kind": "log_fraction", "delta": self.delta}


@dataclass(frozen=True)
class ExplicitRows(RowRule):
    m: int
    kind = "explicit"

    def __post_init__(self):
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ConfigError("explicit row rule needs integer m >= 1")

    def resolve(self, n, mixing):
        return self.m

    def to_json(self):
        return {"kind": "explicit", "m": self.m}


_ROW_RULES = {
    "square": lambda d: SquareRows(),
    "fraction": lambda d: FractionRows(delta=float(d["delta"])),
    "power_fraction": lambda d: PowerFractionRows(delta=float(d["delta"])),
    "log_fraction": lambda d: LogFractionRows(delta=float(d["delta"])),
    "explicit": lambda d: ExplicitRows(m=int(d["m"])),
}


def row_rule_from_json(data: dict) -> RowRule:
    try:
        kind = data["kind"]
        return _ROW_RULES[kind](data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad row rule JSON {data!r}") from exc


_VARIANTS = ("partially_exchangeable", "completely_exchangeable", "hierarchical")


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything needed to reproduce a replica stream of random graphs."""

    n: int
    mixing: MixingSpec
    row_rule: RowRule = SquareRows()
    variant: str = "partially_exchangeable"
    master_seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if self.variant not in _VARIANTS:
            raise ConfigError(f"unknown ensemble variant {self.variant!r}")
        if self.variant == "hierarchical" and not isinstance(self.mixing, HierarchicalMixing):
            raise ConfigError("hierarchical sampling needs a hierarchical mixing law")
        if not (isinstance(self.replicas, int) and self.replicas >= 1):
            raise ConfigError("replicas must be a positive integer")
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed must be an integer")
        self.mixing.validate(self.n)
        m = self.row_rule.resolve(self.n, self.mixing)
        if m < 1:
            raise ConfigError(
                f"row rule resolves to m={m} < 1 at n={self.n}; increase n or delta")

    @property
    def m(self) -> int:
        return self.row_rule.resolve(self.n, self.mixing)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mixing": self.mixing.to_json(),
            "row_rule": self.row_rule.to_json(),
            "variant": self.variant,
            "master_seed": self.master_seed,
            "replicas": self.replicas,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EnsembleConfig":
        try:
            return cls(
                n=int(data["n"]),
                mixing=mixing_from_json(data["mixing"]),
                row_rule=row_rule_from_json(data.get("row_rule", {"kind": "square"})),
                variant=data.get("variant", "partially_exchangeable"),
                master_seed=int(data["master_seed"]),
                replicas=int(data.get("replicas", 1)),
            )
        except KeyError as exc:
            raise ConfigError(f"ensemble config missing field {exc}") from exc


@dataclass
class GraphSample:
    matrix: BitMatrix
    thetas: np.ndarray
    replica_index: int
    seed_used: int


def resolve_rows(config: EnsembleConfig) -> int:
    return config.m


# -- row filling ------------------------------------------------------------


def _pack_row(bits: np.ndarray, words_per_row: int) -> np.ndarray:
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    padded = np.zeros(words_per_row * 8, dtype=np.uint8)
    padded[: packed.size] = packed
    return padded.view("<u8").astype(np.uint64)

def _fill_row(words: np.ndarray, i: int, n: int, theta: float,
              rng: np.random.Generator) -> None:
    """Set row i to n Bernoulli(theta) bits.

    Dense rows draw n uniforms at once; sparse rows walk geometric gaps, so
    the work is proportional to the number of ones.  The two paths produce
    the same distribution (not the same stream), which is what the replica
    determinism contract requires.
    """
    if theta <= 0.0:
        return
    if theta >= _GEOMETRIC_THRESHOLD:
        bits = rng.random(n) < theta
        words[i, :] = _pack_row(bits, words.shape[1])
        return
    expected = n * theta
    batch = max(16, int(expected + 6.0 * math.sqrt(expected) + 16.0))
    pos = -1
    while pos < n:
        gaps = rng.geometric(theta, size=batch)
        cand = pos + np.cumsum(gaps)
        inside = cand[cand < n]
        for j in inside:
            words[i, j >> 6] |= np.uint64(1) << np.uint64(int(j) & 63)
        if cand[-1] >= n:
            break
        pos = int(cand[-1])


def _draw_thetas(config: EnsembleConfig, m: int, rng: np.random.Generator) -> np.ndarray:
    if config.variant == "partially_exchangeable":
        return sample_thetas(config.mixing, config.n, rng, m)
    if config.variant == "completely_exchangeable":
        shared = sample_thetas(config.mixing, config.n, rng, 1)[0]
        return np.full(m, shared)
    # hierarchical: one cutoff for the whole matrix, then iid power-law rows
    mix: HierarchicalMixing = config.mixing  # type: ignore[assignment]
    cutoff = float(mix.sample_cutoff(config.n, rng))
    inner = PowerLawMixing(alpha=cutoff, beta=mix.beta)
    return sample_thetas(inner, config.n, rng, m)


def sample_bias_matrix(config: EnsembleConfig, count: int, rng: np.random.Generator) -> np.ndarray:
    """Per-replica bias matrix of shape (count, m) under the config's variant.

    Batched counterpart of the per-replica draw inside sample_graph, for
    Monte Carlo loops that only need the biases (or the adjacency law built
    from them) and not the bit-packed matrices.
    """
    spec, n, m = config.mixing, config.n, config.m
    if config.variant == "completely_exchangeable":
        shared = sample_thetas(spec, n, rng, count)
        return np.broadcast_to(shared[:, None], (count, m)).copy()
    if config.variant == "hierarchical":
        assert isinstance(spec, HierarchicalMixing)
        cuts = spec.sample_cutoff(n, rng, (count,))
        u = rng.random((count, m))
        bm1 = spec.beta - 1.0
        top = (n / cuts[:, None]) ** bm1
        return (top - u * (top - 1.0)) ** (-1.0 / bm1)
    return sample_thetas(spec, n, rng, count * m).reshape(count, m)


def sample_graph(config: EnsembleConfig, replica_index: int) -> GraphSample:
    """Draw replica ``replica_index`` of the configured ensemble.

    Bitwise deterministic: the replica stream seed is a pure function of
    (master_seed, replica_index), so the result does not depend on scheduling
    or on how many other replicas are drawn.
    """
    if not (isinstance(replica_index, (int, np.integer)) and replica_index >= 0):
        raise ConfigError(f"replica index must be a nonnegative integer, got {replica_index!r}")
    seed = stream_seed(config.master_seed, int(replica_index))
    rng = spawn_rng(config.master_seed, int(replica_index))
    m = config.m
    thetas = _draw_thetas(config, m, rng)
    matrix = BitMatrix(m, config.n)
    for i in range(m):
        _fill_row(matrix.words, i, config.n, float(thetas[i]), rng)
    return GraphSample(matrix=matrix, thetas=thetas,
                       replica_index=int(replica_index), seed_used=seed)


def out_degrees(sample: GraphSample) -> np.ndarray:
    """Row sums: number of out-edges per sender (loops included)."""
    return sample.matrix.row_sums()


def in_degrees(sample: GraphSample) -> np.ndarray:
    """Column sums: number of in-edges per receiver (loops included)."""
    return sample.matrix.col_sums()


def row_prob(spec: MixingSpec, n: int, r: int) -> float:
    """P of one fixed row pattern with r ones: E theta**r (1-theta)**(n-r)."""
    return math.exp(log_row_prob(spec, n, r))


def map_replicas(config: EnsembleConfig, worker, threads: int = 1) -> list:
    """Apply ``worker(sample)`` to every replica; results in replica order.

    The result list is indexed by replica, so reductions over it are
    independent of the thread count and of completion order.
    """
    indices = range(config.replicas)
    if threads <= 1:
        return [worker(sample_graph(config, k)) for k in indices]
    results = [None] * config.replicas
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(lambda k=k: worker(sample_graph(config, k))): k
                   for k in indices}
        for fut, k in futures.items():
            results[k] = fut.result()
    return results


# -- file formats -----------------------------------------------------------


def write_edge_list(sample: GraphSample, config: EnsembleConfig, path) -> None:
    """Text edge list, one '<sender>TAB<receiver>' pair per line, 0-based.

    Header comment lines record the shape, replica seed, and the full mixing
    spec as one-line JSON so a sample is reconstructible from its file.
    """
    matrix = sample.matrix
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# exchgraph edge list\n")
        fh.write(f"# n={matrix.n} m={matrix.m} replica={sample.replica_index} "
                 f"seed={sample.seed_used}\n")
        fh.write(f"# spec={json.dumps(config.mixing.to_json(), sort_keys=True)}\n")
        dense = matrix.to_dense()
        for i, j in zip(*np.nonzero(dense)):
            fh.write(f"{i}\t{j}\n")


def read_edge_list(path) -> tuple[BitMatrix, dict]:
    """Parse an edge list written by :func:`write_edge_list`."""
    meta: dict = {}
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                for tok in body.split():
                    if "=" in tok:
                        key, _, val = tok.partition("=")
                        if key in ("n", "m", "replica", "seed"):
                            meta[key] = int(val)
                if body.startswith("spec="):
                    meta["spec"] = json.loads(body[len("spec="):])
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParameterError(f"malformed edge line {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if "n" not in meta or "m" not in meta:
        raise ParameterError("edge list header must carry n= and m=")
    matrix = BitMatrix(meta["m"], meta["n"])
    for i, j in edges:
        matrix.set(i, j)
    return matrix, meta


def write_bitmatrix(matrix: BitMatrix, path) -> None:
    """Binary dump: magic 'XGB1', u64-LE m and n, then the packed rows."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQ", matrix.m, matrix.n))
        fh.write(matrix.words.astype("<u8").tobytes())


def read_bitmatrix(path) -> BitMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ParameterError(f"bad magic {magic!r}; not a bit-matrix dump")
        m, n = struct.unpack("<QQ", fh.read(16))
        w = (n + 63) // 64
        payload = fh.read(m * w * 8)
        if len(payload) != m * w * 8:
            raise ParameterError("truncated bit-matrix dump")
        words = np.frombuffer(payload, dtype="<u8").reshape(m, w).astype(np.uint64)
    return BitMatrix(int(m), int(n), words)
