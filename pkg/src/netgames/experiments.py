"""Experiment harness: scenario presets, replicated runs, aggregation.

A Scenario fully determines an experiment: network family and parameters,
competing strategy pair, initial placement, evolutionary process, step count,
replicate count and base seed. Replicate r runs with seed base_seed + r.

Plain scenarios generate one network, shared by all replicates, which differ
in strategy placement and dynamics. Assortativity sweeps instead draw a fresh
rewired network for every replicate: at desk scale a single instance's quirks
would otherwise dominate the per-target means the sweep correlates.

Outputs land in one directory per scenario:

    runs/run_NNNN.csv   per-replicate fraction/payoff time series
    aggregate.csv       one summary row per replicate
    network*.edges      the shared network (plain scenarios) or one
                        representative per sweep target; "u v" per line
    meta.txt            every resolved parameter (reloadable as a config) plus
                        result.* summary keys

Everything written is deterministic for a given scenario, so rerunning a
scenario reproduces its output files byte for byte.
"""

from __future__ import annotations

import csv
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .engine import init_hubs, init_random
from .evolution import AdoptionConfig, MoranConfig, RunRecord, run, write_run_csv
from .networks import (
    Network,
    TargetUnreachable,
    assortativity,
    barabasi_albert,
    complete_graph,
    regular_random,
    rewire_to_assortativity,
    write_edgelist,
)
from .strategies import PayoffMatrix, named_strategy


class UnknownPreset(KeyError):
    """Name not present in the preset table."""


class DegenerateInput(ValueError):
    """Correlation is undefined for fewer than two points or zero variance."""


@dataclass(frozen=True)
class Scenario:
    """Fully explicit parameter set for one experiment."""

    name: str
    family: str = "ba"  # "ba" | "regular" | "complete"
    n: int = 1000
    degree: int = 8  # regular family only
    ba_m: int = 1  # ba family only
    rho_targets: tuple[float, ...] = ()  # non-empty turns the scenario into a sweep
    rho_tol: float = 0.025
    rewire_max_steps: int = 400_000
    strategy_a: str = "zd_default"
    strategy_b: str = "pavlov"
    init: str = "random"  # "random" | "hubs"
    hub_strategy: str = "a"  # which side starts on the hubs when init="hubs"
    fraction_a: float = 0.6
    process: str = "moran"  # "moran" | "adoption"
    replacement_rate: float = 0.001
    steps: int = 150_000
    sample_every: int = 100
    replicates: int = 20
    base_seed: int = 1000
    payoff_t: float = 5.0
    payoff_r: float = 3.0
    payoff_p: float = 1.0
    payoff_s: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in ("ba", "regular", "complete"):
            raise ValueError(f"unknown network family {self.family!r}")
        if self.init not in ("random", "hubs"):
            raise ValueError(f"unknown initializer {self.init!r}")
        if self.hub_strategy not in ("a", "b"):
            raise ValueError(f"hub_strategy must be 'a' or 'b', got {self.hub_strategy!r}")
        if self.process not in ("moran", "adoption"):
            raise ValueError(f"unknown process {self.process!r}")
        if not 0.0 <= self.fraction_a <= 1.0:
            raise ValueError("fraction_a outside [0, 1]")
        if self.replicates < 1 or self.steps < 1:
            raise ValueError("replicates and steps must be >= 1")
        if self.rho_targets and self.family != "ba":
            raise ValueError("assortativity sweeps need the ba family")

    @property
    def matrix(self) -> PayoffMatrix:
        return PayoffMatrix(self.payoff_t, self.payoff_r, self.payoff_p, self.payoff_s)


def reduced_profile(s: Scenario, n: int = 200, steps: int = 30_000) -> Scenario:
    """Desk-scale variant of a scenario with the same qualitative behavior."""
    return replace(s, n=n, steps=steps)


def _presets() -> dict[str, Scenario]:
    zd_pav = dict(strategy_a="zd_default", strategy_b="pavlov")
    sf_adopt = dict(family="ba", ba_m=1, process="adoption", **zd_pav)
    table = {
        "fig1_wellmixed_moran": Scenario(
            name="fig1_wellmixed_moran",
            family="regular",
            degree=8,
            init="random",
            fraction_a=0.6,
            process="moran",
            base_seed=1100,
            **zd_pav,
        ),
        "fig1_wellmixed_moran_04": Scenario(
            name="fig1_wellmixed_moran_04",
            family="regular",
            degree=8,
            init="random",
            fraction_a=0.4,
            process="moran",
            base_seed=1150,
            **zd_pav,
        ),
        # m=2 here: death-birth drift on m=1 trees is close to neutral, which
        # blurs the replacement process's selection pressure at desk scale
        "fig2_sf_moran": Scenario(
            name="fig2_sf_moran",
            family="ba",
            ba_m=2,
            init="random",
            fraction_a=0.6,
            process="moran",
            base_seed=1200,
            **zd_pav,
        ),
        "fig2_sf_moran_hubs": Scenario(
            name="fig2_sf_moran_hubs",
            family="ba",
            ba_m=2,
            init="hubs",
            hub_strategy="a",
            fraction_a=0.6,
            process="moran",
            base_seed=1250,
            **zd_pav,
        ),
        "fig3_wellmixed_adoption": Scenario(
            name="fig3_wellmixed_adoption",
            family="regular",
            degree=8,
            init="random",
            fraction_a=0.6,
            process="adoption",
            base_seed=1300,
            **zd_pav,
        ),
        "fig4a_sf_adoption_random": Scenario(
            name="fig4a_sf_adoption_random",
            init="random",
            fraction_a=0.6,
            base_seed=1400,
            **sf_adopt,
        ),
        "fig4b_sf_adoption_hubs": Scenario(
            name="fig4b_sf_adoption_hubs",
            init="hubs",
            hub_strategy="a",
            fraction_a=0.6,
            base_seed=1450,
            **sf_adopt,
        ),
        "fig4b_sf_adoption_hubs_pavlov": Scenario(
            name="fig4b_sf_adoption_hubs_pavlov",
            init="hubs",
            hub_strategy="b",
            fraction_a=0.4,
            base_seed=1475,
            **sf_adopt,
        ),
        # m=2 so the rewiring has cycles to work with (trees cannot reach
        # positive assortativity while staying connected); the loose tolerance
        # lets hard instances settle within 2*tol instead of aborting
        "fig7_assortativity_sweep": Scenario(
            name="fig7_assortativity_sweep",
            family="ba",
            ba_m=2,
            rho_targets=(-0.3, -0.15, 0.0, 0.15, 0.3),
            rho_tol=0.05,
            rewire_max_steps=500_000,
            init="random",
            fraction_a=0.6,
            process="adoption",
            replicates=40,
            base_seed=1700,
            **zd_pav,
        ),
    }
    for fig, name in (
        ("fig5", "general_cooperator"),
        ("fig5", "cooperator"),
        ("fig6", "defector"),
        ("fig6", "tit_for_tat"),
    ):
        short = {"general_cooperator": "gc", "cooperator": "coop",
                 "defector": "defector", "tit_for_tat": "tft"}[name]
        seed = {"gc": 1500, "coop": 1550, "defector": 1600, "tft": 1650}[short]
        table[f"{fig}_{short}"] = Scenario(
            name=f"{fig}_{short}",
            family="ba",
            ba_m=1,
            strategy_a=name,
            strategy_b="pavlov",
            init="hubs",
            hub_strategy="a",
            fraction_a=0.6,
            process="adoption",
            base_seed=seed,
        )
        table[f"{fig}_{short}_random"] = Scenario(
            name=f"{fig}_{short}_random",
            family="ba",
            ba_m=1,
            strategy_a=name,
            strategy_b="pavlov",
            init="random",
            fraction_a=0.6,
            process="adoption",
            base_seed=seed + 25,
        )
    return table


PRESETS: dict[str, Scenario] = _presets()
PRESET_NAMES: tuple[str, ...] = tuple(sorted(PRESETS))


def preset(name: str) -> Scenario:
    """Look up a fully specified scenario preset by name."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; see list-presets for the known names"
        ) from None


def correlate(points) -> float:
    """Pearson correlation coefficient of a sequence of (x, y) pairs."""
    pts = list(points)
    if len(pts) < 2:
        raise DegenerateInput("need at least two points")
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    sx = float(x.std())
    sy = float(y.std())
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInput("zero variance in x or y")
    r = float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))
    return min(1.0, max(-1.0, r))  # keep float dust inside the bound


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from non-negative integer parts."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


# ----------------------------------------------------------------------------
# scenario <-> flat key = value mapping

_INT_FIELDS = {"n", "degree", "ba_m", "rewire_max_steps", "steps", "sample_every",
               "replicates", "base_seed"}
_FLOAT_FIELDS = {"rho_tol", "fraction_a", "replacement_rate",
                 "payoff_t", "payoff_r", "payoff_p", "payoff_s"}


def scenario_to_mapping(s: Scenario) -> dict[str, str]:
    out: dict[str, str] = {}
    for f in fields(Scenario):
        v = getattr(s, f.name)
        if f.name == "rho_targets":
            out[f.name] = ",".join(repr(float(t)) for t in v)
        else:
            out[f.name] = repr(v) if isinstance(v, float) else str(v)
    return out


def scenario_from_mapping(mapping: dict[str, str]) -> Scenario:
    known = {f.name for f in fields(Scenario)}
    kwargs: dict[str, object] = {}
    for key, raw in mapping.items():
        if key not in known:
            raise ValueError(f"unknown scenario key {key!r}")
        if key == "rho_targets":
            kwargs[key] = tuple(float(t) for t in raw.split(",") if t.strip()) if raw else ()
        elif key in _INT_FIELDS:
            kwargs[key] = int(raw)
        elif key in _FLOAT_FIELDS:
            kwargs[key] = float(raw)
        else:
            kwargs[key] = raw
    if "name" not in kwargs:
        raise ValueError("config must define a name")
    return Scenario(**kwargs)


def load_config(path) -> Scenario:
    """Parse a flat "key = value" config file into a Scenario.

    Blank lines and #-comments are skipped, as are result.* and run_* keys, so
    a previously written meta.txt is itself a valid config.
    """
    mapping: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"not a key = value line: {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if "." in key or key.startswith("run_"):
            continue
        mapping[key] = value.strip()
    return scenario_from_mapping(mapping)


# ----------------------------------------------------------------------------
# execution

@dataclass
class GroupResult:
    """Per-network aggregate (one group per assortativity target, else one)."""

    index: int
    target_rho: float | None
    achieved_rho: float
    mean_degree: float
    final_fractions: list[float]
    mean_final: float


@dataclass
class SweepResult:
    """Aggregate over all replicates of a scenario."""

    scenario: Scenario
    records: list[RunRecord]
    final_fractions: list[float]
    mean_final: float
    std_final: float
    groups: list[GroupResult]
    correlation: float | None
    out_dir: Path


_REWIRE_ATTEMPTS = 4


def _build_network(
    s: Scenario, group: int, target: float | None, rep: int
) -> tuple[Network, float]:
    # plain scenarios share one network (rep pinned to 0 by the caller);
    # sweep replicates each get their own instance and rewiring stream
    gen_seed = derive_seed(s.base_seed, 101, group, rep)
    if s.family == "regular":
        net = regular_random(s.n, s.degree, gen_seed)
    elif s.family == "complete":
        net = complete_graph(s.n)
    else:
        net = barabasi_albert(s.n, s.ba_m, gen_seed)
    if target is None:
        return net, assortativity(net).rho
    # the greedy rewiring walk can jam on a bad stream; retry it on fresh
    # deterministic seeds before giving up on the target
    for attempt in range(_REWIRE_ATTEMPTS):
        try:
            return rewire_to_assortativity(
                net, target, tol=s.rho_tol, max_steps=s.rewire_max_steps,
                seed=derive_seed(s.base_seed, 202, group, rep, attempt),
            )
        except TargetUnreachable as exc:
            last = exc
    raise last


def _execute_run(
    s: Scenario,
    net: Network | None,
    group: int,
    target: float | None,
    achieved_rho: float,
    run_index: int,
    runs_dir: Path | None,
) -> RunRecord:
    rep = run_index - group * s.replicates
    if net is None:  # sweep replicate: build this run's own network
        try:
            net, achieved_rho = _build_network(s, group, target, rep)
        except Exception as exc:
            raise type(exc)(
                f"scenario {s.name}, replicate {run_index} "
                f"(target {target}): {exc}"
            ) from exc
    seed = s.base_seed + run_index
    a = named_strategy(s.strategy_a)
    b = named_strategy(s.strategy_b)
    init_seed = derive_seed(seed, 11)
    dyn_seed = derive_seed(seed, 22)
    if s.init == "random":
        pop = init_random(net, a, b, s.fraction_a, init_seed)
        focal = 0
    elif s.hub_strategy == "a":
        pop = init_hubs(net, a, b, s.fraction_a, init_seed)
        focal = 0
    else:
        pop = init_hubs(net, b, a, 1.0 - s.fraction_a, init_seed)
        focal = 1
    if s.process == "moran":
        cfg: MoranConfig | AdoptionConfig = MoranConfig(s.replacement_rate)
    else:
        cfg = AdoptionConfig.for_pair(a, b, s.matrix)
    rec = run(
        pop,
        s.process,
        s.steps,
        s.matrix,
        cfg,
        dyn_seed,
        sample_every=s.sample_every,
        run_id=run_index,
        focal_index=focal,
    )
    rec.seed = seed  # report the replicate seed, not the derived dynamics seed
    rec.target_rho = target
    rec.achieved_rho = achieved_rho
    if runs_dir is not None:
        write_run_csv(rec, runs_dir / f"run_{run_index:04d}.csv")
    return rec


def _pool_task(args) -> RunRecord:
    return _execute_run(*args)


def read_final_fraction(run_csv) -> float:
    """Final strategy-a fraction, read back from a persisted run CSV."""
    with open(run_csv, newline="") as fh:
        last = None
        for last in csv.DictReader(fh):
            pass
    if last is None:
        raise ValueError(f"empty run file {run_csv}")
    return float(last["fraction_a"])


def run_scenario(
    s: Scenario, parallelism: int = 1, out_dir=None
) -> SweepResult:
    """Execute all replicates of a scenario and persist + aggregate the results.

    Aggregate statistics are recomputed from the per-run CSV files after all
    workers finish, so the persisted files are the source of truth.
    """
    out = Path(out_dir) if out_dir is not None else Path(tempfile.mkdtemp(prefix=f"{s.name}-"))
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)

    sweep = bool(s.rho_targets)
    targets: tuple[float | None, ...] = s.rho_targets if sweep else (None,)
    tasks = []
    for gi, target in enumerate(targets):
        if sweep:
            # representative instance: fail fast on unreachable targets and
            # give the output directory one inspectable network per target
            rep_net, _ = _build_network(s, gi, target, rep=0)
            write_edgelist(rep_net, out / f"network_{gi:02d}.edges")
            shared, rho = None, float("nan")
        else:
            try:
                shared, rho = _build_network(s, gi, target, rep=0)
            except Exception as exc:
                raise type(exc)(f"scenario {s.name}: {exc}") from exc
            write_edgelist(shared, out / "network.edges")
        for rep in range(s.replicates):
            run_index = gi * s.replicates + rep
            tasks.append((s, shared, gi, target, rho, run_index, runs_dir))

    records: list[RunRecord] = []
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(_pool_task, tasks))
    else:
        for t in tasks:
            records.append(_execute_run(*t))
    records.sort(key=lambda r: r.run_id)

    # aggregate from the persisted per-run files, not the in-memory records
    finals = [read_final_fraction(runs_dir / f"run_{r.run_id:04d}.csv") for r in records]

    groups: list[GroupResult] = []
    for gi, target in enumerate(targets):
        sl = slice(gi * s.replicates, (gi + 1) * s.replicates)
        grp_finals = finals[sl]
        grp_records = records[sl]
        groups.append(
            GroupResult(
                index=gi,
                target_rho=target,
                achieved_rho=float(np.mean([r.achieved_rho for r in grp_records])),
                mean_degree=float(np.mean([r.mean_degree for r in grp_records])),
                final_fractions=grp_finals,
                mean_final=float(np.mean(grp_finals)),
            )
        )
    correlation: float | None = None
    if s.rho_targets:
        correlation = correlate([(g.achieved_rho, g.mean_final) for g in groups])

    _write_aggregate(out / "aggregate.csv", records, finals, s.replicates)
    result = SweepResult(
        scenario=s,
        records=records,
        final_fractions=finals,
        mean_final=float(np.mean(finals)),
        std_final=float(np.std(finals)),
        groups=groups,
        correlation=correlation,
        out_dir=out,
    )
    _write_meta(out / "meta.txt", result)
    return result


def _write_aggregate(
    path, records: list[RunRecord], finals: list[float], replicates: int
) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "run_id", "seed", "group", "target_rho", "achieved_rho",
                "mean_degree", "class_mean_deg_a", "class_mean_deg_b",
                "extinct_at", "final_fraction_a", "final_fraction_b",
            ]
        )
        for rec, final in zip(records, finals):
            w.writerow(
                [
                    rec.run_id,
                    rec.seed,
                    rec.run_id // replicates,
                    "" if rec.target_rho is None else repr(float(rec.target_rho)),
                    "" if rec.achieved_rho is None else repr(float(rec.achieved_rho)),
                    repr(float(rec.mean_degree)),
                    repr(float(rec.class_mean_deg_a)),
                    repr(float(rec.class_mean_deg_b)),
                    "" if rec.extinct_at is None else rec.extinct_at,
                    repr(float(final)),
                    repr(float(1.0 - final)),
                ]
            )


def _write_meta(path, result: SweepResult) -> None:
    lines = [f"{k} = {v}" for k, v in scenario_to_mapping(result.scenario).items()]
    lines.append(f"result.mean_final_fraction_a = {result.mean_final!r}")
    lines.append(f"result.std_final_fraction_a = {result.std_final!r}")
    if result.correlation is not None:
        lines.append(f"result.correlation_rho_vs_final = {result.correlation!r}")
    for g in result.groups:
        prefix = f"result.group_{g.index}"
        if g.target_rho is not None:
            lines.append(f"{prefix}.target_rho = {g.target_rho!r}")
        lines.append(f"{prefix}.achieved_rho = {g.achieved_rho!r}")
        lines.append(f"{prefix}.mean_degree = {g.mean_degree!r}")
        lines.append(f"{prefix}.mean_final_fraction_a = {g.mean_final!r}")
    Path(path).write_text("\n".join(lines) + "\n")
