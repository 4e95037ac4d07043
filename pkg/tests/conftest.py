"""Shared fixtures: solver availability, instance families, acceptance report."""

import dataclasses

import pytest

from evsp.generators import GridParams, gen_grid
from evsp.model import initial_distribution
from evsp.solver.bridge import SolverConfig, find_cbc, highs_available

HAVE_HIGHS = highs_available()
HAVE_CBC = find_cbc() is not None

needs_highs = pytest.mark.skipif(not HAVE_HIGHS, reason="highspy not installed")
needs_cbc = pytest.mark.skipif(not HAVE_CBC, reason="cbc binary not found")
needs_solver = pytest.mark.skipif(not (HAVE_HIGHS or HAVE_CBC), reason="no MILP solver installed")

_REPORT = []


def solver_config(**kw) -> SolverConfig:
    return SolverConfig.reference("highs" if HAVE_HIGHS else "cbc", time_limit=kw.pop("time_limit", 120), **kw)


def small_instance(seed: int, stress: bool = False):
    """Within the oracle caps: 2-3 stations, 4-6 customers, 3 vehicles.

    ``stress`` starts vehicles partly drained so recharging matters.
    """
    inst = gen_grid(GridParams(stations=2 + seed % 2, customers=4 + seed % 3, seed=seed, capacity_range=(1, 3)))
    vehicles = inst.vehicles[:3]
    if stress:
        L = inst.battery_capacity
        vehicles = tuple(dataclasses.replace(v, initial_energy=L * (1 + (seed + n) % 3) / 3)
                         for n, v in enumerate(vehicles))
    return initial_distribution(dataclasses.replace(inst, vehicles=vehicles, name=f"small-{seed}"))


def tight_instance(seed: int):
    """Three stations, 5-15 customers, scarce spots and small batteries."""
    return gen_grid(GridParams(3, 5 + seed % 11, seed=1000 + seed, capacity_range=(1, 4), battery_kwh=10))


@pytest.fixture(scope="session")
def report():
    """Collects one line per acceptance criterion for the terminal summary."""
    return _REPORT.append


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
