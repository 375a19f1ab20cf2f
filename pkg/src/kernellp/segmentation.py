"""Scribble-driven interactive foreground extraction.

Pixels are 5-vectors [r, g, b, lx, ly] (normalized color + normalized
spatial coordinates). Scribbled pixels become the labeled training set
(background = class 0, foreground = class 1), a grid-stratified subsample
of the remaining pixels joins as unlabeled data, the transductive solver
runs on that training set, and every non-training pixel is classified
inductively through the direct kernel map.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InputError, MissingClassError
from .inductive import predict_map
from .kernels import KernelSpec
from .labels import UNLABELED, LabelSet, build_confidence
from .solver import SolverConfig, fit

BACKGROUND, FOREGROUND = 0, 1
UNSCRIBBLED = -1

# interactive preset: a budget-1500 fit must stay within interactive
# latency, so the iteration budget is short and energy tracking is off;
# accuracy-critical callers can pass their own SolverConfig
INTERACTIVE_SOLVER = SolverConfig(eps=1e-3, max_iter=3, track_objective=False)


@dataclass(frozen=True)
class SegParams:
    """Segmentation knobs: training budget, kernel, solver preset, seed.

    The kernel width default (1.0) is sized for 5-D unit-box pixel
    features: cross-class squared distances sit around 1-3 there, and a
    markedly narrower kernel ties pixels by position instead of color.
    The confidence pair is milder than the classification default (1e10):
    pixel features carry many near-duplicates, and a near-infinite labeled
    weight pushes the solve past its conditioning limit there.
    """

    budget: int = 1500
    kernel: KernelSpec = field(default_factory=lambda: KernelSpec("rbf", width=1.0))
    solver: SolverConfig = INTERACTIVE_SOLVER
    seed: int = 0
    pos_confidence: float = 1e4
    neg_confidence: float = 1.0

    def __post_init__(self):
        if self.budget < 2:
            raise InputError("budget must be >= 2")


@dataclass
class Stroke:
    points: list
    label: str  # "fg" | "bg"
    radius: int = 1


def featurize(image):
    """Per-pixel 5-vectors, row-major: [r, g, b, lx, ly], all in [0, 1].

    Spatial coordinates are normalized by (width-1)/(height-1); a
    single-pixel dimension maps to 0.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise InputError(f"expected an RGB raster (H, W, 3), got shape {image.shape}")
    h, w = image.shape[:2]
    rgb = image.reshape(-1, 3).astype(np.float64) / 255.0
    xs = np.tile(np.arange(w, dtype=np.float64), h)
    ys = np.repeat(np.arange(h, dtype=np.float64), w)
    lx = xs / (w - 1) if w > 1 else np.zeros_like(xs)
    ly = ys / (h - 1) if h > 1 else np.zeros_like(ys)
    return np.column_stack([rgb, lx, ly]).T


def rasterize_strokes(strokes, height, width):
    """Paint strokes onto a (H, W) raster: -1 untouched, 0 bg, 1 fg.

    Polylines are drawn with Bresenham segments then dilated by the
    stroke radius; later strokes overwrite earlier ones on overlap.
    """
    raster = np.full((height, width), UNSCRIBBLED, dtype=np.int8)
    for stroke in strokes:
        cls = FOREGROUND if stroke.label == "fg" else BACKGROUND
        pts = [(int(round(x)), int(round(y))) for x, y in stroke.points]
        for x, y in pts:
            if not (0 <= x < width and 0 <= y < height):
                raise InputError(f"stroke point ({x}, {y}) outside image bounds {width}x{height}")
        mask = np.zeros((height, width), dtype=bool)
        if len(pts) == 1:
            mask[pts[0][1], pts[0][0]] = True
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            for x, y in _bresenham(x0, y0, x1, y1):
                mask[y, x] = True
        r = max(int(stroke.radius), 0)
        if r > 0:
            mask = _dilate(mask, r)
        raster[mask] = cls
    return raster


def _bresenham(x0, y0, x1, y1):
    dx, dy = abs(x1 - x0), abs(y1 - y0)
    sx, sy = (1 if x0 < x1 else -1), (1 if y0 < y1 else -1)
    err = dx - dy
    x, y = x0, y0
    while True:
        yield x, y
        if x == x1 and y == y1:
            return
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x += sx
        if e2 < dx:
            err += dx
            y += sy


def _dilate(mask, radius):
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    out = np.zeros_like(mask)
    offsets = [
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dy * dy + dx * dx <= radius * radius
    ]
    for dy, dx in offsets:
        yy = np.clip(ys + dy, 0, h - 1)
        xx = np.clip(xs + dx, 0, w - 1)
        out[yy, xx] = True
    return out


def _grid_subsample(height, width, excluded_flat, count, rng):
    """Roughly uniform spatial coverage: snap a grid of cell centers to
    pixels, drop excluded/duplicate picks, top up with seeded random
    draws from the remainder."""
    total = height * width
    if count <= 0:
        return np.empty(0, dtype=np.int64)
    gy = max(1, int(round(np.sqrt(count * height / max(width, 1)))))
    gx = max(1, int(np.ceil(count / gy)))
    cy = np.minimum(((np.arange(gy) + 0.5) * height / gy).astype(np.int64), height - 1)
    cx = np.minimum(((np.arange(gx) + 0.5) * width / gx).astype(np.int64), width - 1)
    flat = (cy[:, None] * width + cx[None, :]).ravel()
    excluded = np.zeros(total, dtype=bool)
    excluded[excluded_flat] = True
    picks = np.unique(flat[~excluded[flat]])
    if picks.size > count:
        keep = np.linspace(0, picks.size - 1, count).astype(np.int64)
        picks = picks[keep]
    elif picks.size < count:
        pool_mask = ~excluded
        pool_mask[picks] = False
        pool = np.flatnonzero(pool_mask)
        extra = min(count - picks.size, pool.size)
        if extra > 0:
            picks = np.sort(np.concatenate([picks, rng.choice(pool, size=extra, replace=False)]))
    return picks


def build_training_set(features, scribble_raster, budget=1500, seed=0):
    """Training matrix and LabelSet: all scribbled pixels (labeled) plus a
    grid-stratified unlabeled subsample filling up to the budget.

    Returns (X_train, label_set, train_flat_indices). Raises
    MissingClassError unless both classes are scribbled.
    """
    h, w = scribble_raster.shape
    flat = scribble_raster.ravel()
    scribbled = np.flatnonzero(flat != UNSCRIBBLED)
    for cls, name in ((FOREGROUND, "foreground"), (BACKGROUND, "background")):
        if not np.any(flat[scribbled] == cls):
            raise MissingClassError(f"no {name} scribbles; both classes are required")
    rng = np.random.default_rng(seed)
    n_unlabeled = max(0, int(budget) - scribbled.size)
    extra = _grid_subsample(h, w, scribbled, n_unlabeled, rng)
    train = np.concatenate([scribbled, extra])
    order = np.argsort(train, kind="stable")
    train = train[order]
    assignments = np.full(train.size, UNLABELED, dtype=np.int64)
    scribble_pos = np.searchsorted(train, scribbled)
    assignments[scribble_pos] = flat[scribbled]
    return features[:, train], LabelSet(assignments=assignments, class_count=2), train


@dataclass
class SegmentStats:
    n_train: int
    iterations: int
    converged: bool
    fit_ms: float

    def to_json(self):
        return {
            "n_train": self.n_train,
            "iterations": self.iterations,
            "converged": self.converged,
            "fit_ms": self.fit_ms,
        }


def segment_pixels(features, scribble_raster, params=None):
    """Run the full pipeline on featurized pixels.

    Training pixels keep their transductive labels, the rest are
    classified through the direct kernel map, and scribbled pixels are
    forced to their scribble label. Returns (mask (H, W) uint8, stats).
    """
    params = params or SegParams()
    h, w = scribble_raster.shape
    total = h * w
    x_train, label_set, train_idx = build_training_set(
        features, scribble_raster, budget=params.budget, seed=params.seed
    )
    conf = build_confidence(label_set, params.pos_confidence, params.neg_confidence)
    t0 = time.perf_counter()
    model = fit(x_train, label_set, params.kernel, params.solver, conf=conf)
    fit_ms = (time.perf_counter() - t0) * 1000.0

    labels_flat = np.empty(total, dtype=np.int64)
    labels_flat[train_idx] = model.F_train.hard
    rest = np.setdiff1d(np.arange(total), train_idx, assume_unique=False)
    if rest.size:
        # cap the cross-Gram block at ~32 MB regardless of image size
        chunk = max(1024, 4_000_000 // max(train_idx.size, 1))
        for start in range(0, rest.size, chunk):
            block = rest[start : start + chunk]
            labels_flat[block] = predict_map(model, features[:, block]).hard
    scribbled = scribble_raster.ravel() != UNSCRIBBLED
    labels_flat[scribbled] = scribble_raster.ravel()[scribbled]
    mask = (labels_flat.reshape(h, w) == FOREGROUND).astype(np.uint8)
    stats = SegmentStats(
        n_train=int(train_idx.size),
        iterations=model.iterations,
        converged=model.converged,
        fit_ms=fit_ms,
    )
    return mask, stats


@dataclass
class SegmentationSession:
    """Server-side state for one image being scribbled on."""

    session_id: str
    image: np.ndarray
    features: np.ndarray
    strokes: list = field(default_factory=list)
    version: int = 0
    params: SegParams = field(default_factory=SegParams)
    mask: Optional[np.ndarray] = None
    mask_version: int = -1
    last_stats: Optional[SegmentStats] = None

    @property
    def height(self):
        return self.image.shape[0]

    @property
    def width(self):
        return self.image.shape[1]

    def add_strokes(self, strokes):
        for s in strokes:
            if s.label not in ("fg", "bg"):
                raise InputError(f"stroke label must be 'fg' or 'bg', got {s.label!r}")
            if not s.points:
                raise InputError("stroke must carry at least one point")
        # validate bounds before mutating anything
        rasterize_strokes(self.strokes + list(strokes), self.height, self.width)
        self.strokes.extend(strokes)
        self.version += 1
        return self.version

    def clear_strokes(self):
        self.strokes.clear()
        self.version += 1
        self.mask = None
        self.mask_version = -1
        self.last_stats = None
        return self.version

    def segment(self, params=None):
        params = params or self.params
        if self.mask is not None and self.mask_version == self.version and params == self.params:
            return self.mask, self.last_stats
        raster = rasterize_strokes(self.strokes, self.height, self.width)
        mask, stats = segment_pixels(self.features, raster, params)
        self.params = params
        self.mask = mask
        self.mask_version = self.version
        self.last_stats = stats
        return mask, stats


def params_from_json(obj, base=None):
    """Apply a JSON params override onto a SegParams base."""
    base = base or SegParams()
    if not obj:
        return base
    kernel = base.kernel
    if "kernel_width" in obj:
        kernel = kernel.with_width(float(obj["kernel_width"]))
    solver_fields = {k: obj[k] for k in ("alpha", "beta", "eps", "max_iter") if k in obj}
    solver = replace(base.solver, **solver_fields) if solver_fields else base.solver
    return SegParams(
        budget=int(obj.get("budget", base.budget)),
        kernel=kernel,
        solver=solver,
        seed=int(obj.get("seed", base.seed)),
        pos_confidence=float(obj.get("pos_confidence", base.pos_confidence)),
        neg_confidence=float(obj.get("neg_confidence", base.neg_confidence)),
    )
