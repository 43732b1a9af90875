"""Dataset format, synthetic data generation, ONI computation, and splitting.

The native "HQGD" binary holds a manifest plus homogeneous samples:

    magic b"HQGD" | u32 version | u64 manifest length | manifest JSON (utf-8)
    then per sample, in list order:
        i32 year | i32 target_month | f64 target_oni | f32 x (n_nodes*d_0) features

All integers and floats are little-endian; features are row-major (node-major)
float32, targets float64. The manifest declares n_samples, n_nodes, d_0,
lead_h, a free-form source tag, and the grid (null for synthetic data).

Grid node ordering is lat-major: node = lat_index * n_lon + lon_index, with
band centers ascending in latitude then longitude.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    NonFiniteError,
    OverlappingRangesError,
    RegionNotCoveredError,
    ShapeInconsistentError,
    ShapeMismatchError,
    TruncatedFileError,
    VersionMismatchError,
)

DATASET_MAGIC = b"HQGD"
DATASET_VERSION = 1

# Nino3.4 box: 5S-5N, 170W-120W (i.e. 190E-240E)
NINO34_LAT = (-5.0, 5.0)
NINO34_LON = (190.0, 240.0)


@dataclass(frozen=True)
class GridSpec:
    """Regular lat/lon grid of band centers; defaults match the 5-degree study domain."""

    lat_min: float = -55.0
    lat_max: float = 60.0
    lon_min: float = 0.0
    lon_max: float = 360.0
    resolution: float = 5.0

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        for lo, hi in ((self.lat_min, self.lat_max), (self.lon_min, self.lon_max)):
            if hi <= lo:
                raise ValueError("grid extent must be increasing")
            if abs((hi - lo) / self.resolution - round((hi - lo) / self.resolution)) > 1e-9:
                raise ValueError("extent must be a whole number of bands")

    @property
    def n_lat(self) -> int:
        return int(round((self.lat_max - self.lat_min) / self.resolution))

    @property
    def n_lon(self) -> int:
        return int(round((self.lon_max - self.lon_min) / self.resolution))

    @property
    def n_nodes(self) -> int:
        return self.n_lat * self.n_lon

    @property
    def lat_centers(self) -> np.ndarray:
        return self.lat_min + self.resolution * (np.arange(self.n_lat) + 0.5)

    @property
    def lon_centers(self) -> np.ndarray:
        return self.lon_min + self.resolution * (np.arange(self.n_lon) + 0.5)

    def to_json(self) -> dict:
        return {
            "lat_min": self.lat_min,
            "lat_max": self.lat_max,
            "lon_min": self.lon_min,
            "lon_max": self.lon_max,
            "resolution": self.resolution,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        return cls(**obj)


@dataclass
class Sample:
    """One forecast instance: per-node feature window and its future index value."""

    features: np.ndarray  # (n_nodes, d_0) float32
    target_oni: float
    lead_h: int
    target_month: int  # 1..12
    year: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float32)
        if self.features.ndim != 2:
            raise ShapeMismatchError("sample features must be (n_nodes, d_0)")
        if not 1 <= self.target_month <= 12:
            raise ValueError(f"target_month {self.target_month} outside 1..12")


@dataclass
class Dataset:
    """Ordered samples plus the manifest describing their common shape."""

    samples: list[Sample]
    manifest: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i) -> Sample:
        return self.samples[i]

    def features_array(self) -> np.ndarray:
        """Stacked features, shape (n_samples, n_nodes, d_0), float64."""
        return np.stack([s.features for s in self.samples]).astype(np.float64)

    def targets_array(self) -> np.ndarray:
        return np.array([s.target_oni for s in self.samples], dtype=np.float64)

    def months_array(self) -> np.ndarray:
        return np.array([s.target_month for s in self.samples], dtype=np.int64)

    def years_array(self) -> np.ndarray:
        return np.array([s.year for s in self.samples], dtype=np.int64)


def _check_homogeneous(ds: Dataset) -> tuple[int, int]:
    shapes = {s.features.shape for s in ds.samples}
    if len(shapes) > 1:
        raise ShapeInconsistentError(f"mixed feature shapes in dataset: {sorted(shapes)}")
    if ds.samples:
        return ds.samples[0].features.shape
    return (int(ds.manifest.get("n_nodes", 0)), int(ds.manifest.get("d_0", 0)))


def save_dataset(ds: Dataset, path: str):
    """Write the HQGD binary; rejects non-finite features or targets."""
    n_nodes, d_0 = _check_homogeneous(ds)
    lead = ds.samples[0].lead_h if ds.samples else int(ds.manifest.get("lead_h", 0))
    manifest = dict(ds.manifest)
    manifest.update(
        n_samples=len(ds.samples), n_nodes=int(n_nodes), d_0=int(d_0), lead_h=int(lead)
    )
    manifest.setdefault("source", "unspecified")
    manifest.setdefault("grid", None)
    mjson = json.dumps(manifest, sort_keys=True).encode()

    blob = bytearray()
    blob += DATASET_MAGIC
    blob += struct.pack("<I", DATASET_VERSION)
    blob += struct.pack("<Q", len(mjson))
    blob += mjson
    for i, s in enumerate(ds.samples):
        if not np.isfinite(s.features).all() or not np.isfinite(s.target_oni):
            raise NonFiniteError(f"sample {i} contains NaN or infinite values")
        if s.lead_h != lead:
            raise ShapeInconsistentError("mixed lead_h across samples")
        blob += struct.pack("<iid", s.year, s.target_month, float(s.target_oni))
        blob += np.ascontiguousarray(s.features, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(blob)


def load_dataset(path: str) -> Dataset:
    """Read an HQGD binary back into a Dataset (bit-exact round trip)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != DATASET_MAGIC:
        raise BadMagicError(f"not an HQGD file: {path}")
    if len(data) < 16:
        raise TruncatedFileError("header cut short")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != DATASET_VERSION:
        raise VersionMismatchError(f"unsupported dataset version {version}")
    (mlen,) = struct.unpack_from("<Q", data, 8)
    if 16 + mlen > len(data):
        raise TruncatedFileError("manifest cut short")
    try:
        manifest = json.loads(data[16 : 16 + mlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ShapeInconsistentError(f"manifest is not valid JSON: {exc}") from exc

    for key in ("n_samples", "n_nodes", "d_0", "lead_h"):
        if key not in manifest:
            raise ShapeInconsistentError(f"manifest missing {key!r}")
    n_samples, n_nodes, d_0 = manifest["n_samples"], manifest["n_nodes"], manifest["d_0"]
    lead = manifest["lead_h"]
    sample_bytes = 4 + 4 + 8 + 4 * n_nodes * d_0
    expected = 16 + mlen + n_samples * sample_bytes
    if len(data) < expected:
        raise TruncatedFileError(
            f"expected {expected} bytes for {n_samples} samples, file has {len(data)}"
        )
    if len(data) > expected:
        raise ShapeInconsistentError("trailing bytes after declared samples")

    samples = []
    offset = 16 + mlen
    for _ in range(n_samples):
        year, month, target = struct.unpack_from("<iid", data, offset)
        offset += 16
        feats = np.frombuffer(data, dtype="<f4", count=n_nodes * d_0, offset=offset)
        offset += 4 * n_nodes * d_0
        samples.append(Sample(feats.reshape(n_nodes, d_0).copy(), target, lead, month, year))
    return Dataset(samples, manifest)


# ---------------------------------------------------------------------------
# ONI


def _running_mean3(series: np.ndarray) -> np.ndarray:
    """Centered 3-month running mean; endpoints fall back to 2-month means."""
    out = np.empty_like(series)
    out[1:-1] = (series[:-2] + series[1:-1] + series[2:]) / 3.0
    out[0] = (series[0] + series[1]) / 2.0
    out[-1] = (series[-2] + series[-1]) / 2.0
    return out


def nino34_node_indices(grid: GridSpec) -> np.ndarray:
    """Lat-major node indices whose band centers fall in the Nino3.4 box."""
    if (
        grid.lat_min > NINO34_LAT[0]
        or grid.lat_max < NINO34_LAT[1]
        or grid.lon_min > NINO34_LON[0]
        or grid.lon_max < NINO34_LON[1]
    ):
        raise RegionNotCoveredError("grid extent does not contain the Nino3.4 box")
    lat_in = np.nonzero(
        (grid.lat_centers >= NINO34_LAT[0]) & (grid.lat_centers <= NINO34_LAT[1])
    )[0]
    lon_in = np.nonzero(
        (grid.lon_centers >= NINO34_LON[0]) & (grid.lon_centers <= NINO34_LON[1])
    )[0]
    if lat_in.size == 0 or lon_in.size == 0:
        raise RegionNotCoveredError("no grid band centers inside the Nino3.4 box")
    return (lat_in[:, None] * grid.n_lon + lon_in[None, :]).reshape(-1)


def compute_oni(sst_anomaly_series: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Monthly ONI from a (T, n_nodes) anomaly series on the given grid.

    Spatial mean over the Nino3.4 box then a centered 3-month running mean.
    The box mean is unweighted: at 5-degree resolution only the +-2.5 degree
    bands fall inside, and their cos-latitude weights are equal.
    """
    series = np.asarray(sst_anomaly_series, dtype=np.float64)
    if series.ndim != 2 or series.shape[1] != grid.n_nodes:
        raise ShapeMismatchError(
            f"expected (T, {grid.n_nodes}) anomaly series, got {series.shape}"
        )
    if series.shape[0] < 3:
        raise ShapeMismatchError("need at least 3 months of anomalies")
    box = nino34_node_indices(grid)
    return _running_mean3(series[:, box].mean(axis=1))


# ---------------------------------------------------------------------------
# synthetic data

SYNTH_BASE_YEAR = 1850  # month tags count from January of this year
_AR_PERIOD = 40.0
_AR_DAMPING = 0.999
_AR_INNOVATION = 0.05
_SNR_TARGET = 10.0


def synth_enso(
    seed: int,
    n_samples: int,
    n_nodes: int,
    d_0: int = 3,
    lead_h: int = 1,
    noise: float = 1.0,
) -> Dataset:
    """ENSO-like synthetic dataset from a damped-oscillator latent index.

    The latent index follows an AR(2) with period about 40 steps; node
    features are the index's trailing d_0-month window times a fixed random
    per-node loading, plus Gaussian noise at SNR about 10 when noise=1. The
    target is the index lead_h steps past the window, and the whole index is
    rescaled to the ONI-like range +-2.5. ``noise`` scales both the feature
    noise and the AR innovations, so noise=0 makes the target an exact linear
    function of the features (d_0 >= 2).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if n_nodes < 1 or d_0 < 1 or lead_h < 1:
        raise ValueError("n_nodes, d_0, and lead_h must be >= 1")
    rng = np.random.default_rng(seed)

    T = n_samples + d_0 - 1 + lead_h
    omega = 2.0 * np.pi / _AR_PERIOD
    phi1 = 2.0 * _AR_DAMPING * np.cos(omega)
    phi2 = -_AR_DAMPING * _AR_DAMPING
    x = np.empty(T)
    x[0], x[1] = rng.standard_normal(2)
    innov = rng.standard_normal(T) * (_AR_INNOVATION * noise)
    for t in range(2, T):
        x[t] = phi1 * x[t - 1] + phi2 * x[t - 2] + innov[t]
    x *= 2.5 / np.abs(x).max()

    loading = rng.standard_normal(n_nodes)
    # windows[i] = x[i : i + d_0], the d_0 months ending at forecast start
    windows = np.lib.stride_tricks.sliding_window_view(x, d_0)[:n_samples]
    signal = loading[None, :, None] * windows[:, None, :]
    noise_amp = noise * np.sqrt(np.mean(signal**2)) / _SNR_TARGET
    feats = signal + noise_amp * rng.standard_normal(signal.shape)
    feats = feats.astype(np.float32)

    samples = []
    for i in range(n_samples):
        t_target = i + d_0 - 1 + lead_h
        month = t_target % 12 + 1
        year = SYNTH_BASE_YEAR + t_target // 12
        samples.append(Sample(feats[i], float(x[t_target]), lead_h, month, year))
    manifest = {
        "n_samples": n_samples,
        "n_nodes": n_nodes,
        "d_0": d_0,
        "lead_h": lead_h,
        "source": f"synth_enso(seed={seed}, noise={noise})",
        "grid": None,
    }
    return Dataset(samples, manifest)


def split_by_year(ds: Dataset, train_years: tuple, test_years: tuple) -> tuple[Dataset, Dataset]:
    """Partition by sample year into inclusive ranges; order preserved.

    Samples outside both ranges are dropped.
    """
    t0, t1 = int(train_years[0]), int(train_years[1])
    s0, s1 = int(test_years[0]), int(test_years[1])
    if t1 < t0 or s1 < s0:
        raise ValueError("year ranges must be (first, last) with first <= last")
    if t0 <= s1 and s0 <= t1:
        raise OverlappingRangesError(
            f"train {t0}-{t1} and test {s0}-{s1} overlap"
        )
    train = [s for s in ds.samples if t0 <= s.year <= t1]
    test = [s for s in ds.samples if s0 <= s.year <= s1]
    return (
        Dataset(train, {**ds.manifest, "n_samples": len(train)}),
        Dataset(test, {**ds.manifest, "n_samples": len(test)}),
    )
