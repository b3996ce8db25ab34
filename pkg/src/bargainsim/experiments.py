"""Monte Carlo welfare harness: random agent populations, scenarios, sweeps.

A scenario fixes the two curiosity types, the protocol variant and a seed,
then runs many independent bargainings between freshly drawn agents. Per-draw
seeds are derived from the scenario seed by counter, and aggregation walks the
draws in counter order, so reports are byte-identical regardless of how many
worker processes execute the draws.

Welfare is the mean utility per side over the bargainings that actually took
place; pairs turned away by the matching gate exchange nothing and are
excluded from the mean but reported through `not_matched_rate` (all outcome
rates are fractions of all draws and sum to one).
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .agents import AgentSpec, CuriosityType, StrategyParams
from .protocol import OutcomeKind, ProtocolConfig, run
from .records import Role
from .seeding import derive_seed

Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class DistributionParams:
    """Population the experiment draws agents from.

    Reserve prices are Gaussian truncated to positive values; strategy
    parameters are uniform. Opening targets are a fraction of the agent's own
    reserve (below one for purchasers, above one for sellers). The defaults
    are calibration knobs chosen so the shipped configuration reproduces the
    published welfare orderings at desk scale.
    """

    purchaser_reserve_mean: float = 15.0
    purchaser_reserve_std: float = 4.5
    seller_reserve_mean: float = 17.5
    seller_reserve_std: float = 4.5
    kappa_range: tuple[float, float] = (0.0, 0.2)
    beta_range: tuple[float, float] = (1.0, 5.0)
    purchaser_gamma_fraction_range: tuple[float, float] = (0.6, 0.9)
    seller_gamma_fraction_range: tuple[float, float] = (1.1, 1.4)
    pace_horizon_range: tuple[int, int] = (100, 1600)
    info_base: float = 8.0
    info_scale: float = 0.02

    def __post_init__(self) -> None:
        if self.purchaser_reserve_std < 0 or self.seller_reserve_std < 0:
            raise ValueError("reserve stds must be non-negative")
        for name in (
            "kappa_range",
            "beta_range",
            "purchaser_gamma_fraction_range",
            "seller_gamma_fraction_range",
            "pace_horizon_range",
        ):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound {lo} exceeds upper bound {hi}")
        if not 0.0 < self.purchaser_gamma_fraction_range[1] < 1.0:
            raise ValueError("purchaser gamma fractions must lie in (0, 1)")
        if self.purchaser_gamma_fraction_range[0] <= 0.0:
            raise ValueError("purchaser gamma fractions must lie in (0, 1)")
        if self.seller_gamma_fraction_range[0] <= 1.0:
            raise ValueError("seller gamma fractions must exceed 1")
        if self.pace_horizon_range[0] < 1:
            raise ValueError("pace horizons must be >= 1")
        if self.info_base <= 1.0 or self.info_scale <= 0.0:
            raise ValueError("info_base must exceed 1 and info_scale be positive")


def _draw_with_rng(
    role: Role, ctype: CuriosityType, dist: DistributionParams, rng: random.Random
) -> AgentSpec:
    if role is Role.PURCHASER:
        mean, std = dist.purchaser_reserve_mean, dist.purchaser_reserve_std
        frac_range = dist.purchaser_gamma_fraction_range
    else:
        mean, std = dist.seller_reserve_mean, dist.seller_reserve_std
        frac_range = dist.seller_gamma_fraction_range
    reserve = rng.gauss(mean, std)
    while reserve <= 0.0:
        reserve = rng.gauss(mean, std)
    kappa = rng.uniform(*dist.kappa_range)
    beta = rng.uniform(*dist.beta_range)
    fraction = rng.uniform(*frac_range)
    horizon = rng.randint(*dist.pace_horizon_range)
    return AgentSpec(
        role=role,
        ctype=ctype,
        initial_reserve=reserve,
        info_base=dist.info_base,
        info_scale=dist.info_scale,
        strategy=StrategyParams(
            kappa=kappa, beta=beta, gamma=fraction * reserve, pace_horizon=horizon
        ),
    )


def draw_agent(
    role: Role, ctype: CuriosityType, dist: DistributionParams, draw_seed: int
) -> AgentSpec:
    """Deterministic in `draw_seed`: same seed, same agent."""
    return _draw_with_rng(role, ctype, dist, random.Random(draw_seed))


def representative_agent(
    role: Role, ctype: CuriosityType, dist: DistributionParams
) -> AgentSpec:
    """The agent at the centre of the population: means and range midpoints."""
    if role is Role.PURCHASER:
        reserve = dist.purchaser_reserve_mean
        frac_range = dist.purchaser_gamma_fraction_range
    else:
        reserve = dist.seller_reserve_mean
        frac_range = dist.seller_gamma_fraction_range
    mid = lambda r: (r[0] + r[1]) / 2.0
    return AgentSpec(
        role=role,
        ctype=ctype,
        initial_reserve=reserve,
        info_base=dist.info_base,
        info_scale=dist.info_scale,
        strategy=StrategyParams(
            kappa=mid(dist.kappa_range),
            beta=mid(dist.beta_range),
            gamma=mid(frac_range) * reserve,
            pace_horizon=int(mid(dist.pace_horizon_range)),
        ),
    )


def population_sampler(
    role: Role,
    ctypes: Sequence[CuriosityType],
    dist: DistributionParams,
) -> Callable[[random.Random], AgentSpec]:
    """Sampler over agents of the given role with types drawn from `ctypes`."""
    pool = tuple(ctypes)
    if not pool:
        raise ValueError("at least one curiosity type is required")

    def sample(rng: random.Random) -> AgentSpec:
        ctype = pool[rng.randrange(len(pool))]
        return _draw_with_rng(role, ctype, dist, rng)

    return sample


@dataclass(frozen=True)
class Scenario:
    seller_type: CuriosityType
    purchaser_type: CuriosityType
    variant: str  # barg | mat | bou | all
    bound: int = 500
    draws: int = 10_000
    seed: int = 0
    dist: DistributionParams = field(default_factory=DistributionParams)
    opener: Role = Role.PURCHASER
    curious_counts: str = "opponent"

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise ValueError(f"draws must be >= 1, got {self.draws}")

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig.for_variant(
            self.variant, bound=self.bound, opener=self.opener, curious_counts=self.curious_counts
        )


@dataclass(frozen=True)
class WelfareReport:
    """Per-side welfare with dispersion, outcome rates and message volume.

    Means (and the message count) are taken over bargained runs; rates are
    fractions of all draws. `ci95` half-widths use the normal approximation
    and are zero when fewer than two bargained runs exist.
    """

    mean_seller: float
    ci95_seller: float
    mean_purchaser: float
    ci95_purchaser: float
    success_rate: float
    reject_rate: float
    not_matched_rate: float
    forced_rate: float
    mean_messages: float
    draws: int

    def mean(self, side: Role) -> float:
        return self.mean_purchaser if side is Role.PURCHASER else self.mean_seller

    def to_dict(self) -> dict:
        return {
            "mean_seller": self.mean_seller,
            "ci95_seller": self.ci95_seller,
            "mean_purchaser": self.mean_purchaser,
            "ci95_purchaser": self.ci95_purchaser,
            "success_rate": self.success_rate,
            "reject_rate": self.reject_rate,
            "not_matched_rate": self.not_matched_rate,
            "forced_rate": self.forced_rate,
            "mean_messages": self.mean_messages,
            "draws": self.draws,
        }


# one draw boiled down for aggregation: (seller u, purchaser u, kind, messages)
_DrawStat = tuple[float, float, str, int]


def simulate_draw(scenario: Scenario, index: int) -> _DrawStat:
    """Run draw `index` of the scenario; deterministic in (seed, index)."""
    seller = draw_agent(
        Role.SELLER, scenario.seller_type, scenario.dist, derive_seed(scenario.seed, 2 * index)
    )
    purchaser = draw_agent(
        Role.PURCHASER,
        scenario.purchaser_type,
        scenario.dist,
        derive_seed(scenario.seed, 2 * index + 1),
    )
    result = run(seller, purchaser, config=scenario.protocol_config())
    return (
        result.seller_utility,
        result.purchaser_utility,
        result.outcome.kind.value,
        result.record.message_count,
    )


def _simulate_chunk(scenario: Scenario, start: int, stop: int) -> list[_DrawStat]:
    return [simulate_draw(scenario, i) for i in range(start, stop)]


def _mean_ci(values: list[float]) -> tuple[float, float]:
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, Z95 * math.sqrt(var / n)


def _aggregate(stats: list[_DrawStat], draws: int) -> WelfareReport:
    kinds = [s[2] for s in stats]
    bargained = [s for s in stats if s[2] != OutcomeKind.NOT_MATCHED.value]
    mean_s, ci_s = _mean_ci([s[0] for s in bargained])
    mean_p, ci_p = _mean_ci([s[1] for s in bargained])
    msgs = [float(s[3]) for s in bargained]
    mean_msgs = math.fsum(msgs) / len(msgs) if msgs else 0.0
    n = float(draws)
    reject_kinds = (OutcomeKind.REJECTED.value, OutcomeKind.LIVELOCK.value)
    return WelfareReport(
        mean_seller=mean_s,
        ci95_seller=ci_s,
        mean_purchaser=mean_p,
        ci95_purchaser=ci_p,
        success_rate=kinds.count(OutcomeKind.AGREEMENT.value) / n,
        reject_rate=sum(kinds.count(k) for k in reject_kinds) / n,
        not_matched_rate=kinds.count(OutcomeKind.NOT_MATCHED.value) / n,
        forced_rate=kinds.count(OutcomeKind.FORCED.value) / n,
        mean_messages=mean_msgs,
        draws=draws,
    )


def run_scenario(scenario: Scenario, jobs: int = 1) -> WelfareReport:
    """Execute all draws and aggregate; identical for any `jobs` value."""
    stats = _collect_stats(scenario, jobs)
    return _aggregate(stats, scenario.draws)


def scenario_records(scenario: Scenario):
    """Replay the scenario's draws, yielding each bargaining record in order.

    Pairs turned away by the matching gate yield their (empty) records too, so
    the stream has exactly `draws` lines.
    """
    config = scenario.protocol_config()
    for i in range(scenario.draws):
        seller = draw_agent(
            Role.SELLER, scenario.seller_type, scenario.dist, derive_seed(scenario.seed, 2 * i)
        )
        purchaser = draw_agent(
            Role.PURCHASER,
            scenario.purchaser_type,
            scenario.dist,
            derive_seed(scenario.seed, 2 * i + 1),
        )
        yield run(seller, purchaser, config=config).record


def _collect_stats(scenario: Scenario, jobs: int) -> list[_DrawStat]:
    if jobs <= 1 or scenario.draws < 2 * jobs:
        return _simulate_chunk(scenario, 0, scenario.draws)
    chunk = -(-scenario.draws // jobs)  # ceil division
    ranges = [
        (start, min(start + chunk, scenario.draws))
        for start in range(0, scenario.draws, chunk)
    ]
    stats: list[_DrawStat] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_simulate_chunk, scenario, a, b) for a, b in ranges]
        for fut in futures:  # submission order == counter order
            stats.extend(fut.result())
    return stats


# --- variant and bound sweeps ----------------------------------------------

FIG2_PAIRINGS = ("unc-vs-unc", "cur-vs-unc", "cur-vs-sec", "sec-vs-unc", "sec-vs-cur")

_TYPE_SHORT = {
    "unc": CuriosityType.UNCURIOUS,
    "cur": CuriosityType.CURIOUS,
    "sec": CuriosityType.SECRETIVE,
    "cs": CuriosityType.CURIOUS_SECRETIVE,
}


def pairing_types(pairing: str) -> tuple[CuriosityType, CuriosityType]:
    """(purchaser type, seller type) for a focal-vs-opponent pairing label.

    The focal type negotiates as the purchaser, whose utility the published
    welfare figures track; the opponent type is the seller.
    """
    try:
        focal, _, opponent = pairing.partition("-vs-")
        return _TYPE_SHORT[focal], _TYPE_SHORT[opponent]
    except KeyError as exc:
        raise ValueError(f"unknown pairing {pairing!r}") from exc


def sweep_variants(
    purchaser_type: CuriosityType,
    seller_type: CuriosityType,
    dist: DistributionParams,
    draws: int,
    seed: int,
    bound: int = 500,
    jobs: int = 1,
    curious_counts: str = "opponent",
) -> dict[str, WelfareReport]:
    """One report per variant, all four sharing the same draw seed stream."""
    table: dict[str, WelfareReport] = {}
    for variant in ("barg", "mat", "bou", "all"):
        scenario = Scenario(
            seller_type=seller_type,
            purchaser_type=purchaser_type,
            variant=variant,
            bound=bound,
            draws=draws,
            seed=seed,
            dist=dist,
            curious_counts=curious_counts,
        )
        table[variant] = run_scenario(scenario, jobs=jobs)
    return table


@dataclass(frozen=True)
class BoundSweep:
    bounds: tuple[int, ...]
    reports: tuple[WelfareReport, ...]
    plateau: int | None  # smallest bound after which welfare has flattened

    def welfare(self, side: Role = Role.PURCHASER) -> list[float]:
        return [r.mean(side) for r in self.reports]


def detect_plateau(
    bounds: Sequence[int], welfare: Sequence[float], epsilon: float = 0.02
) -> int | None:
    """Smallest bound after which consecutive welfare changes stay small.

    Changes are measured relative to the largest absolute welfare on the
    curve, which keeps the detector meaningful when the curve crosses zero.
    Returns None when even the final step still moves more than epsilon.
    """
    if len(bounds) != len(welfare) or len(bounds) < 2:
        raise ValueError("need matching bounds and welfare with at least two points")
    scale = max(abs(w) for w in welfare)
    if scale == 0.0:
        return bounds[0]
    flat = [abs(welfare[i] - welfare[i - 1]) < epsilon * scale for i in range(1, len(welfare))]
    plateau_idx: int | None = None
    for i in range(len(flat) - 1, -1, -1):
        if not flat[i]:
            break
        plateau_idx = i
    return bounds[plateau_idx] if plateau_idx is not None else None


def sweep_bound(
    purchaser_type: CuriosityType,
    seller_type: CuriosityType,
    dist: DistributionParams,
    bounds: Sequence[int],
    draws: int,
    seed: int,
    jobs: int = 1,
    curious_counts: str = "opponent",
) -> BoundSweep:
    """Bounded-variant welfare as a function of the proposal bound."""
    if len(bounds) < 2:
        raise ValueError("bound sweep needs at least two bounds")
    if list(bounds) != sorted(bounds):
        raise ValueError("bounds must be sorted ascending")
    reports = []
    for b in bounds:
        scenario = Scenario(
            seller_type=seller_type,
            purchaser_type=purchaser_type,
            variant="bou",
            bound=b,
            draws=draws,
            seed=seed,
            dist=dist,
            curious_counts=curious_counts,
        )
        reports.append(run_scenario(scenario, jobs=jobs))
    welfare = [r.mean_purchaser for r in reports]
    return BoundSweep(
        bounds=tuple(bounds),
        reports=tuple(reports),
        plateau=detect_plateau(list(bounds), welfare),
    )


def run_fig2(
    dist: DistributionParams,
    draws: int,
    seed: int,
    bound: int = 500,
    jobs: int = 1,
    pairings: Sequence[str] = FIG2_PAIRINGS,
    curious_counts: str = "opponent",
) -> dict[str, dict[str, WelfareReport]]:
    """The comparative welfare table: pairing -> variant -> report."""
    table: dict[str, dict[str, WelfareReport]] = {}
    for pairing in pairings:
        purchaser_type, seller_type = pairing_types(pairing)
        table[pairing] = sweep_variants(
            purchaser_type,
            seller_type,
            dist,
            draws,
            seed,
            bound=bound,
            jobs=jobs,
            curious_counts=curious_counts,
        )
    return table


@dataclass(frozen=True)
class AssertionResult:
    name: str
    holds: bool
    detail: str


def fig2_assertions(table: dict[str, dict[str, WelfareReport]]) -> list[AssertionResult]:
    """Published welfare orderings and ratios, evaluated on a fig2 table.

    The focal side is the purchaser throughout. Missing pairings are skipped
    so a restricted run can still be checked.
    """
    out: list[AssertionResult] = []

    def check(name: str, holds: bool, detail: str) -> None:
        out.append(AssertionResult(name, bool(holds), detail))

    def w(pairing: str, variant: str) -> float:
        report = table[pairing][variant]
        if pairing == "unc-vs-unc":
            # both parties carry the focal type; their welfare is the
            # population mean over both sides
            return (report.mean_purchaser + report.mean_seller) / 2.0
        return report.mean_purchaser

    if "unc-vs-unc" in table:
        barg, mat = w("unc-vs-unc", "barg"), w("unc-vs-unc", "mat")
        bou, allv = w("unc-vs-unc", "bou"), w("unc-vs-unc", "all")
        check(
            "uncurious ordering all > mat > barg > bou",
            allv > mat > barg > bou,
            f"all={allv:.4g} mat={mat:.4g} barg={barg:.4g} bou={bou:.4g}",
        )
        check(
            "uncurious mat/barg in [1.5, 3]",
            barg > 0 and 1.5 <= mat / barg <= 3.0,
            f"ratio={mat / barg:.3g}" if barg > 0 else "barg not positive",
        )
        check(
            "uncurious all/barg in [2.5, 6]",
            barg > 0 and 2.5 <= allv / barg <= 6.0,
            f"ratio={allv / barg:.3g}" if barg > 0 else "barg not positive",
        )
        check(
            "uncurious bou/barg in [0.8, 1.0]",
            barg > 0 and 0.8 <= bou / barg <= 1.0,
            f"ratio={bou / barg:.3g}" if barg > 0 else "barg not positive",
        )

    if "cur-vs-unc" in table:
        barg = w("cur-vs-unc", "barg")
        check(
            "curious-vs-uncurious mat <= 0.92 barg",
            w("cur-vs-unc", "mat") <= 0.92 * barg,
            f"mat={w('cur-vs-unc', 'mat'):.4g} barg={barg:.4g}",
        )
        check(
            "curious-vs-uncurious all <= 0.92 barg",
            w("cur-vs-unc", "all") <= 0.92 * barg,
            f"all={w('cur-vs-unc', 'all'):.4g} barg={barg:.4g}",
        )
        check(
            "curious: bounding lowers welfare vs uncurious",
            w("cur-vs-unc", "bou") < barg,
            f"bou={w('cur-vs-unc', 'bou'):.4g} barg={barg:.4g}",
        )
    if "cur-vs-sec" in table and "cur-vs-unc" in table:
        check(
            "curious welfare worse vs secretive than vs uncurious (barg)",
            w("cur-vs-sec", "barg") < w("cur-vs-unc", "barg"),
            f"vs-sec={w('cur-vs-sec', 'barg'):.4g} vs-unc={w('cur-vs-unc', 'barg'):.4g}",
        )
    if "cur-vs-sec" in table:
        check(
            "curious: bounding raises welfare vs secretive",
            w("cur-vs-sec", "bou") > w("cur-vs-sec", "barg"),
            f"bou={w('cur-vs-sec', 'bou'):.4g} barg={w('cur-vs-sec', 'barg'):.4g}",
        )

    if "sec-vs-unc" in table:
        barg, mat, allv = (
            w("sec-vs-unc", "barg"),
            w("sec-vs-unc", "mat"),
            w("sec-vs-unc", "all"),
        )
        check("secretive barg < 0", barg < 0, f"barg={barg:.4g}")
        check("secretive mat > 0", mat > 0, f"mat={mat:.4g}")
        check(
            "secretive |mat| in [0.6, 1.4] |barg|",
            barg != 0 and 0.6 <= abs(mat) / abs(barg) <= 1.4,
            f"ratio={abs(mat) / abs(barg):.3g}" if barg != 0 else "barg is zero",
        )
        check(
            "secretive |all| in [2, 4] |barg|",
            barg != 0 and 2.0 <= abs(allv) / abs(barg) <= 4.0,
            f"ratio={abs(allv) / abs(barg):.3g}" if barg != 0 else "barg is zero",
        )
    if "sec-vs-cur" in table and "sec-vs-unc" in table:
        for variant in ("barg", "mat", "bou", "all"):
            check(
                f"secretive worse vs curious than vs uncurious ({variant})",
                w("sec-vs-cur", variant) < w("sec-vs-unc", variant),
                f"vs-cur={w('sec-vs-cur', variant):.4g} vs-unc={w('sec-vs-unc', variant):.4g}",
            )
    return out
