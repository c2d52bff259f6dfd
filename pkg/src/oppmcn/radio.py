"""Link-quality models: path loss with correlated shadowing, uplink grants, TBS lookup,
802.11 rate selection and block-error decisions."""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from importlib import resources

from .geometry import Obstacle, Position, obstruction

# Sample kinds
KIND_D2D_RSSI = "d2d_rssi"
KIND_CELL_RSRP = "cell_rsrp"
KIND_CELL_ITBS = "cell_itbs_grant"
# Sample sources
SRC_DATA_ACK = "data_ack"
SRC_BEACON = "beacon"
SRC_DCI = "dci"
SRC_REF_SIGNAL = "reference_signal"

_KINDS = {KIND_D2D_RSSI, KIND_CELL_RSRP, KIND_CELL_ITBS}
_SOURCES = {SRC_DATA_ACK, SRC_BEACON, SRC_DCI, SRC_REF_SIGNAL}

ITBS_MAX = 26
PRB_BANDWIDTH_HZ = 180e3


@dataclass(frozen=True)
class LinkSample:
    t: float
    kind: str
    value: float
    source: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown sample kind {self.kind!r}")
        if self.source not in _SOURCES:
            raise ValueError(f"unknown sample source {self.source!r}")
        if self.kind == KIND_CELL_ITBS:
            if self.value != int(self.value) or not 0 <= self.value <= ITBS_MAX:
                raise ValueError(f"grant index out of range: {self.value}")
        elif not math.isfinite(self.value):
            raise ValueError("power sample must be finite")


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path loss with site link budget and environment losses."""

    tx_power_dbm: float
    antenna_gain_db: float = 0.0
    pl0: float = 70.0  # dB at the reference distance
    d0: float = 10.0  # meters
    exponent_los: float = 2.2
    exponent_nlos: float = 3.8
    shadowing_sigma: float = 3.0  # dB
    shadowing_corr_m: float = 10.0  # distance constant of the AR-1 shadowing process
    corner_loss: float = 12.0  # dB added whenever the path is obstructed
    vehicle_cabin_loss: float = 8.0  # dB for a transmitter inside a car body
    indoor_depth_loss: float = 0.5  # dB per meter of in-building path
    fading_sigma: float = 2.0  # dB, per-block fast fade on the decode margin
    cabin_fading_sigma: float = 8.0  # dB, richer scattering inside a cabin

    def __post_init__(self):
        if self.exponent_los < 1 or self.exponent_nlos < 1:
            raise ValueError("path loss exponents must be >= 1")
        if self.d0 <= 0:
            raise ValueError("reference distance must be > 0")
        for name in ("shadowing_sigma", "corner_loss", "vehicle_cabin_loss",
                     "indoor_depth_loss", "fading_sigma", "cabin_fading_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def mean_received_power(tx: Position, rx: Position,
                        obstacles: tuple[Obstacle, ...] | list[Obstacle],
                        params: PathLossParams, extra_loss_db: float = 0.0) -> float:
    """Median received power in dBm (no shadowing draw); rejects degenerate geometry."""
    d = tx.distance_to(rx)
    if d < params.d0:
        raise ValueError(f"link distance {d:.2f} m below reference distance {params.d0} m")
    clear, penetration, depth_m = obstruction(tx, rx, obstacles)
    exponent = params.exponent_los if clear else params.exponent_nlos
    loss = params.pl0 + 10.0 * exponent * math.log10(d / params.d0)
    if not clear:
        loss += params.corner_loss + penetration + params.indoor_depth_loss * depth_m
    return params.tx_power_dbm + params.antenna_gain_db - loss - extra_loss_db


class ShadowingProcess:
    """First-order autoregressive shadowing over distance travelled; one instance per link."""

    __slots__ = ("sigma", "corr_m", "_rng", "value")

    def __init__(self, sigma: float, corr_m: float, rng: random.Random):
        self.sigma = sigma
        self.corr_m = corr_m
        self._rng = rng
        self.value = rng.gauss(0.0, sigma) if sigma > 0 else 0.0

    def advance(self, delta_m: float) -> float:
        if self.sigma > 0 and delta_m > 0:
            rho = math.exp(-delta_m / self.corr_m)
            self.value = rho * self.value + math.sqrt(1.0 - rho * rho) * self._rng.gauss(0.0, self.sigma)
        return self.value


def received_power(tx: Position, rx: Position,
                   obstacles: tuple[Obstacle, ...] | list[Obstacle],
                   params: PathLossParams, shadowing: ShadowingProcess,
                   moved_m: float, extra_loss_db: float = 0.0) -> float:
    """One received-power sample in dBm; reproducible for a fixed seed and call order."""
    return (mean_received_power(tx, rx, obstacles, params, extra_loss_db)
            + shadowing.advance(moved_m))


def _default_breakpoints() -> tuple[tuple[float, int], ...]:
    # One index per dB; -80 dBm lands exactly on 18 and -72 dBm saturates at 26.
    return tuple((-98.0 + k, k) for k in range(1, ITBS_MAX + 1))


@dataclass(frozen=True)
class GrantPolicy:
    """Monotone RSRP to transport-block-size-index map used for uplink grants."""

    breakpoints: tuple[tuple[float, int], ...] = field(default_factory=_default_breakpoints)
    n_prb: int = 25

    def __post_init__(self):
        if not 1 <= self.n_prb <= 25:
            raise ValueError("n_prb must be in [1, 25]")
        prev_r, prev_i = -math.inf, 0
        for rsrp, itbs in self.breakpoints:
            if rsrp <= prev_r or itbs < prev_i:
                raise ValueError("grant breakpoints must increase in rsrp and be non-decreasing in index")
            if not 0 <= itbs <= ITBS_MAX:
                raise ValueError("grant index out of [0, 26]")
            prev_r, prev_i = rsrp, itbs
        object.__setattr__(self, "_edges", [r for r, _ in self.breakpoints])
        object.__setattr__(self, "_levels", [0] + [i for _, i in self.breakpoints])

    def decode_floor_dbm(self, itbs: int) -> float:
        """Lowest RSRP at which the policy grants `itbs` (50 % decode point before back-off)."""
        for rsrp, idx in self.breakpoints:
            if idx >= itbs:
                return rsrp
        return self.breakpoints[-1][0]


def grant_itbs(rsrp: float, policy: GrantPolicy) -> int:
    """Clamped monotone lookup of the grant index for a reported RSRP."""
    return policy._levels[bisect_right(policy._edges, rsrp)]  # type: ignore[attr-defined]


class TbsTable:
    """Transport block bits per TTI, indexed by (i_tbs 0..26, n_prb 1..25)."""

    def __init__(self, rows: dict[tuple[int, int], int]):
        self.n_prb_max = max(n for _, n in rows)
        self._bits = [[0] * self.n_prb_max for _ in range(ITBS_MAX + 1)]
        for (i, n), bits in rows.items():
            if not 0 <= i <= ITBS_MAX or not 1 <= n <= self.n_prb_max:
                raise ValueError(f"table entry out of range: i_tbs={i} n_prb={n}")
            self._bits[i][n - 1] = bits
        self.validate()

    def validate(self) -> None:
        for i in range(ITBS_MAX + 1):
            for n in range(self.n_prb_max):
                v = self._bits[i][n]
                if v <= 0:
                    raise ValueError(f"missing or non-positive entry at i_tbs={i} n_prb={n + 1}")
                if n > 0 and v < self._bits[i][n - 1]:
                    raise ValueError(f"bits decrease with n_prb at i_tbs={i} n_prb={n + 1}")
                if i > 0 and v < self._bits[i - 1][n]:
                    raise ValueError(f"bits decrease with i_tbs at i_tbs={i} n_prb={n + 1}")

    def bits(self, i_tbs: int, n_prb: int) -> int:
        if n_prb == 0:
            return 0
        if not 0 <= i_tbs <= ITBS_MAX:
            raise ValueError(f"i_tbs {i_tbs} out of [0, {ITBS_MAX}]")
        if not 1 <= n_prb <= self.n_prb_max:
            raise ValueError(f"n_prb {n_prb} out of [1, {self.n_prb_max}]")
        return self._bits[i_tbs][n_prb - 1]

    def row(self, n_prb: int) -> list[int]:
        """Bits for every index at a fixed PRB count (hot-loop lookup list)."""
        if not 1 <= n_prb <= self.n_prb_max:
            raise ValueError(f"n_prb {n_prb} out of [1, {self.n_prb_max}]")
        return [self._bits[i][n_prb - 1] for i in range(ITBS_MAX + 1)]

    @classmethod
    def parse(cls, text: str) -> "TbsTable":
        rows: dict[tuple[int, int], int] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"tbs table line {lineno}: expected 'i_tbs n_prb bits'")
            try:
                i, n, bits = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise ValueError(f"tbs table line {lineno}: {exc}") from None
            if (i, n) in rows:
                raise ValueError(f"tbs table line {lineno}: duplicate entry for ({i}, {n})")
            rows[(i, n)] = bits
        if not rows:
            raise ValueError("tbs table is empty")
        return cls(rows)


_default_table: TbsTable | None = None


def default_tbs_table() -> TbsTable:
    global _default_table
    if _default_table is None:
        text = resources.files("oppmcn").joinpath("data/tbs_table.txt").read_text()
        _default_table = TbsTable.parse(text)
    return _default_table


def tbs_bits(i_tbs: int, n_prb: int, table: TbsTable | None = None) -> int:
    return (table or default_tbs_table()).bits(i_tbs, n_prb)


def _default_rate_ladder() -> tuple[tuple[float, float], ...]:
    # Receiver-sensitivity style thresholds (dBm) for the 802.11a/g OFDM rate set.
    return ((-82.0, 6e6), (-81.0, 9e6), (-79.0, 12e6), (-77.0, 18e6),
            (-74.0, 24e6), (-70.0, 36e6), (-66.0, 48e6), (-65.0, 54e6))


@dataclass(frozen=True)
class D2DRateParams:
    thresholds: tuple[tuple[float, float], ...] = field(default_factory=_default_rate_ladder)
    mac_efficiency: float = 0.5

    def __post_init__(self):
        if not 0 < self.mac_efficiency <= 1:
            raise ValueError("mac_efficiency must be in (0, 1]")
        prev_t, prev_r = -math.inf, 0.0
        for thr, rate in self.thresholds:
            if thr <= prev_t or rate <= prev_r:
                raise ValueError("rate thresholds must increase with rssi and rate")
            prev_t, prev_r = thr, rate
        object.__setattr__(self, "_edges", [t for t, _ in self.thresholds])
        object.__setattr__(self, "_rates", [r for _, r in self.thresholds])


def d2d_phy_rate(rssi: float, params: D2DRateParams) -> float:
    """Selected net rate in bit/s; the link floors at the base rate while associated."""
    i = bisect_right(params._edges, rssi)  # type: ignore[attr-defined]
    rate = params._rates[max(i - 1, 0)]  # type: ignore[attr-defined]
    return rate * params.mac_efficiency


def d2d_rate_threshold(rssi: float, params: D2DRateParams) -> float:
    """Decode threshold (dBm) of the rate the link would select at this RSSI."""
    i = bisect_right(params._edges, rssi)  # type: ignore[attr-defined]
    return params._edges[max(i - 1, 0)]  # type: ignore[attr-defined]


def block_error_probability(margin_db: float, steepness: float = 1.0) -> float:
    """Logistic error probability: 0.5 at zero margin, vanishing for large margins."""
    x = steepness * margin_db
    if x > 60:
        return math.exp(-x) / (1.0 + math.exp(-x)) if x < 700 else 0.0
    if x < -60:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


def block_error(margin_db: float, rng: random.Random, steepness: float = 1.0) -> bool:
    return rng.random() < block_error_probability(margin_db, steepness)
