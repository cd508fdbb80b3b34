# osim/core/harness.py
"""
Scenario execution
==================

``verify_scenario`` runs one catalog entry: hypotheses first, then the
conclusion checker on every comparison the scenario builds. A failed or
uncheckable hypothesis stops the run with INCONCLUSIVE, so a report can
only say VIOLATED when every hypothesis was verified. Advisory hypotheses
(generator validity) are reported and noted but never stop the run.

``run_config`` executes a config file (one experiment or a batch) and writes
one report per scenario plus an index.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from osim import __version__
from osim.config import app_settings
from osim.core.exceptions import ConfigParseError, OsimError, UnknownScenarioError
from osim.core.orderings import (
    UNIVARIATE_RELATIONS,
    check_disp_multi,
    check_dyn_hr,
    check_order_uni,
    check_st_multi,
    dyn_hr_time_grid,
)
from osim.core.report_export import write_index, write_report
from osim.core.scenarios import CATALOG, Comparison, ScenarioInstance, get_scenario, list_scenarios, run_hypothesis
from osim.models.config_models import ExperimentConfig, is_batch, parse_batch, parse_experiment, read_config_file
from osim.models.report_models import BatchIndex, CheckResult, IndexEntry, Report, ScenarioMethod
from osim.models.verdict_models import CheckMode, OrderRelation, OrderVerdict, VerdictStatus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3

__all__ = ["list_scenarios", "get_scenario", "verify_scenario", "run_batch", "run_config", "exit_code_for"]


def _method(inst: ScenarioInstance) -> ScenarioMethod:
    scenario = inst.scenario
    override = inst.config.method
    if override is None or override == scenario.method:
        return scenario.method
    if scenario.relation not in UNIVARIATE_RELATIONS or scenario.relation == OrderRelation.C:
        logger.warning(f"{scenario.id}: method override '{override.value}' ignored for {scenario.relation.value}")
        return scenario.method
    return override


def _run_check(inst: ScenarioInstance, comparison: Comparison, method: ScenarioMethod) -> OrderVerdict:
    relation = inst.scenario.relation
    x, y = comparison.x, comparison.y
    grids = inst.config.grids
    if relation == OrderRelation.ST_MULTI:
        return check_st_multi(inst.sample(x.model).select(x.view), inst.sample(y.model).select(y.view),
                              seed=inst.seed)
    if relation == OrderRelation.DYN_HR:
        times = dyn_hr_time_grid(x.model, grids.time_levels)
        return check_dyn_hr(x.model, y.model, offset_x=x.view[0] - 1, offset_y=y.view[0] - 1,
                            dim=len(x.view), times=times)
    if relation == OrderRelation.DISP_MULTI:
        return check_disp_multi(x.model, x.view, y.model, y.view, u_points=grids.u_points)
    (i,), (j,) = x.view, y.view
    if method == ScenarioMethod.MONTE_CARLO:
        return check_order_uni(inst.sample(x.model).column(i), inst.sample(y.model).column(j), relation,
                               mode=CheckMode.EMPIRICAL)
    return check_order_uni(inst.marginal(x.model, i), inst.marginal(y.model, j), relation, mode=CheckMode.ANALYTIC)


def _excess(verdict: OrderVerdict) -> float:
    return verdict.max_violation - verdict.tolerance


def _aggregate(checks: List[CheckResult]) -> Tuple[VerdictStatus, Optional[float], Optional[float]]:
    if not checks:
        return VerdictStatus.INCONCLUSIVE, None, None
    statuses = {c.verdict.status for c in checks}
    if VerdictStatus.VIOLATED in statuses:
        status = VerdictStatus.VIOLATED
    elif VerdictStatus.INCONCLUSIVE in statuses:
        status = VerdictStatus.INCONCLUSIVE
    else:
        status = VerdictStatus.HOLDS
    worst = max(checks, key=lambda c: _excess(c.verdict)).verdict
    return status, worst.max_violation, worst.tolerance


def verify_scenario(scenario_id: str, config: Optional[ExperimentConfig] = None, seed: int = 0) -> Report:
    """Verify one scenario; ``config`` overrides the scenario defaults field by field.

    Model construction errors propagate. Failures of non-advisory hypotheses and
    checker errors give INCONCLUSIVE.
    """
    scenario = get_scenario(scenario_id)
    inst = scenario.instance(config, seed)
    method = _method(inst)
    reverse = inst.config.reverse
    logger.info(f"Verifying {scenario.id} (seed={inst.seed}, N={inst.config.N}, method={method.value}, "
                f"reverse={reverse})")

    comparisons = scenario.comparisons(inst)
    if reverse:
        comparisons = [Comparison(f"reversed: {c.label}", c.y, c.x) for c in comparisons]

    notes: List[str] = []
    hypotheses = [run_hypothesis(h, inst) for h in scenario.hypotheses]
    failing = next((h.name for h in hypotheses if not h.holds and not h.advisory), None)
    for h in hypotheses:
        if h.advisory and not h.holds:
            notes.append(f"advisory hypothesis '{h.name}' does not hold; conclusion checked through the "
                         f"W representation")

    checks: List[CheckResult] = []
    if failing is not None:
        notes.append(f"hypothesis '{failing}' does not hold; conclusion not checked")
        status, max_violation, tolerance = VerdictStatus.INCONCLUSIVE, None, None
    else:
        try:
            for comparison in comparisons:
                verdict = _run_check(inst, comparison, method)
                logger.debug(f"{scenario.id} [{comparison.label}]: {verdict.status.value}")
                checks.append(CheckResult(label=comparison.label, verdict=verdict))
            status, max_violation, tolerance = _aggregate(checks)
        except OsimError as e:
            logger.warning(f"{scenario.id}: conclusion check failed: {e}", exc_info=True)
            notes.append(f"conclusion check could not complete: {type(e).__name__}: {e}")
            status, max_violation, tolerance = VerdictStatus.INCONCLUSIVE, None, None

    if inst.gr_n_used is not None:
        notes.append(f"G(nu) condition evaluated with n = {inst.gr_n_used} (gr_n = {inst.config.gr_n!r})")
    if reverse:
        notes.append("direction reversed: X and Y swapped in the conclusion only")

    logger.info(f"{scenario.id}: {status.value}")
    return Report(
        tool_version=__version__,
        scenario=scenario.id,
        title=scenario.title,
        statement=scenario.statement,
        relation=scenario.relation,
        method=method,
        reverse=reverse,
        seed=inst.seed,
        N=inst.config.N,
        gr_n=inst.gr_n_used,
        config=inst.config.model_dump(mode="json"),
        hypotheses=hypotheses,
        failing_hypothesis=failing,
        verdict=status,
        max_violation=max_violation,
        tolerance=tolerance,
        checks=checks,
        notes=notes,
    )


def exit_code_for(entries: List[IndexEntry]) -> int:
    if any(e.error is not None for e in entries):
        return EXIT_ERROR
    statuses = {e.status for e in entries}
    if VerdictStatus.VIOLATED in statuses:
        return EXIT_VIOLATED
    if VerdictStatus.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _report_names(configs: List[ExperimentConfig]) -> List[str]:
    seen: Dict[str, int] = {}
    names = []
    for config in configs:
        try:
            sid = get_scenario(config.scenario).id
        except UnknownScenarioError:
            sid = str(config.scenario)
        count = seen.get(sid, 0)
        seen[sid] = count + 1
        names.append(f"{sid}.json" if count == 0 else f"{sid}_{count}.json")
    return names


def run_batch(configs: List[ExperimentConfig], out_dir: Union[str, Path],
              workers: Optional[int] = None) -> Tuple[BatchIndex, List[Report]]:
    """Run experiments as an independent parallel map; reports are written in input order."""
    out_dir = Path(out_dir)
    workers = workers or app_settings.WORKERS

    def run(config: ExperimentConfig) -> Tuple[Optional[Report], float, Optional[str]]:
        start = time.perf_counter()
        try:
            report = verify_scenario(config.scenario, config)
            return report, time.perf_counter() - start, None
        except OsimError as e:
            logger.error(f"Scenario {config.scenario} failed: {e}", exc_info=True)
            return None, time.perf_counter() - start, f"{type(e).__name__}: {e}"
        except Exception as e:
            logger.error(f"Unexpected error in scenario {config.scenario}: {e}", exc_info=True)
            return None, time.perf_counter() - start, f"{type(e).__name__}: {e}"

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, configs))

    entries: List[IndexEntry] = []
    reports: List[Report] = []
    for config, name, (report, wall_time, error) in zip(configs, _report_names(configs), results):
        if report is None:
            entries.append(IndexEntry(scenario=str(config.scenario), wall_time=wall_time, error=error))
            continue
        write_report(report, out_dir / name)
        reports.append(report)
        entries.append(IndexEntry(scenario=report.scenario, status=report.verdict, report_path=name,
                                  wall_time=wall_time))

    index = BatchIndex(tool_version=__version__, exit_code=exit_code_for(entries), entries=entries)
    write_index(index, out_dir, reports)
    return index, reports


def load_experiments(path: Union[str, Path], scenario: Optional[str] = None) -> List[ExperimentConfig]:
    """Experiments described by a config file; ``scenario`` runs a single-experiment file under another id."""
    data = read_config_file(path)
    if scenario is not None:
        if is_batch(data) and "runs" in data:
            raise ConfigParseError("a batch config cannot be combined with --scenario", field="runs")
        return [parse_experiment({**data, "scenario": scenario})]
    if is_batch(data):
        return parse_batch(data).experiments(list(CATALOG))
    return [parse_experiment(data)]


def run_config(path: Union[str, Path], out_dir: Optional[Union[str, Path]] = None,
               scenario: Optional[str] = None, workers: Optional[int] = None) -> int:
    """Execute a config file; returns the process exit status.

    Config errors are raised as ``ConfigParseError``; per-scenario errors are
    recorded in the index without aborting the batch.
    """
    configs = load_experiments(path, scenario)
    out_dir = Path(out_dir) if out_dir is not None else app_settings.OUTPUT_DIR
    logger.info(f"Running {len(configs)} experiment(s) from {path} into {out_dir}")
    index, _ = run_batch(configs, out_dir, workers)
    logger.info(f"Batch finished with exit code {index.exit_code}")
    return index.exit_code
