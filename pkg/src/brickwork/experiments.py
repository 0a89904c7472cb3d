"""Ensemble averages of subsystem quantities over brickwork circuit realizations."""
from __future__ import annotations

import math
from functools import partial
from typing import Optional

import numpy as np

from .circuit import DEFAULT_MEM_CAP, CircuitGeometry, IntervalSpec, run_brickwork
from .density import (
    distance_to_maximally_mixed,
    mutual_information,
    reduce,
    reduced_spectrum,
    spectrum_entropy,
    spectrum_purity,
)
from .ensemble import EnsembleEstimate, run_trials
from .errors import InvalidArgument
from .rng import RngLike, RngStream, root_stream

METRICS = ("purity", "renyi2", "von_neumann", "trace_distance", "mi", "mi_renyi2")


def _metric_value(metric: str, state, sites: list, cut: Optional[int]) -> float:
    if metric in ("mi", "mi_renyi2"):
        A, B = sites[:cut], sites[cut:]
        return mutual_information(state, A, B, kind="vn" if metric == "mi" else "renyi2")
    if metric == "trace_distance":
        return distance_to_maximally_mixed(reduce(state, sites))
    w = reduced_spectrum(state, sites)
    if metric == "purity":
        return spectrum_purity(w)
    if metric == "renyi2":
        return -math.log(spectrum_purity(w))
    return spectrum_entropy(w)


def _trial(i: int, *, metric, geometry, sites, T, cut, root: RngStream, mem_cap) -> float:
    state = run_brickwork(geometry, T, root.substream(i), mem_cap=mem_cap)
    return _metric_value(metric, state, sites, cut)


def _check_metric(metric: str, interval: IntervalSpec, cut: Optional[int]) -> None:
    if metric not in METRICS:
        raise InvalidArgument(f"unknown metric {metric!r}; choose from {METRICS}")
    if metric.startswith("mi"):
        if cut is None or not 0 <= cut <= interval.length:
            raise InvalidArgument(f"mutual information needs a cut in [0, {interval.length}], got {cut}")


def trial_values(
    metric: str,
    geometry: CircuitGeometry,
    interval: IntervalSpec,
    T: int,
    trials: int,
    rng: RngLike,
    *,
    cut: Optional[int] = None,
    workers: int = 1,
    mem_cap: Optional[int] = DEFAULT_MEM_CAP,
) -> np.ndarray:
    """Per-trial metric values; trial ``i`` uses substream ``i`` of ``rng``."""
    _check_metric(metric, interval, cut)
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    interval.validate(geometry, T)
    geometry.check_memory(mem_cap)
    fn = partial(
        _trial,
        metric=metric,
        geometry=geometry,
        sites=interval.sites(geometry),
        T=T,
        cut=cut,
        root=root_stream(rng),
        mem_cap=mem_cap,
    )
    return np.asarray(run_trials(fn, trials, workers=workers), dtype=float)


def ensemble_average(
    metric: str,
    geometry: CircuitGeometry,
    interval: IntervalSpec,
    T: int,
    trials: int,
    rng: RngLike,
    **kwargs,
) -> EnsembleEstimate:
    """Mean and standard error of ``metric`` over independent circuit realizations.

    ``metric`` is one of ``purity``, ``renyi2``, ``von_neumann``,
    ``trace_distance`` (to the maximally mixed state), ``mi`` or ``mi_renyi2``
    (mutual information across ``cut`` sites from the left end of the interval).
    """
    root = root_stream(rng)
    values = trial_values(metric, geometry, interval, T, trials, root, **kwargs)
    return EnsembleEstimate.from_samples(values, seed=root.seed)


def _profile_trial(i: int, *, geometry, sites, T, cuts, root: RngStream, mem_cap) -> np.ndarray:
    state = run_brickwork(geometry, T, root.substream(i), mem_cap=mem_cap)
    whole = reduced_spectrum(state, sites)
    s_ab = {"vn": spectrum_entropy(whole), "renyi2": -math.log(spectrum_purity(whole))}
    out = []
    for x in cuts:
        if x == 0 or x == len(sites):
            out.extend([0.0, 0.0])
            continue
        wa, wb = reduced_spectrum(state, sites[:x]), reduced_spectrum(state, sites[x:])
        out.append(spectrum_entropy(wa) + spectrum_entropy(wb) - s_ab["vn"])
        out.append(-math.log(spectrum_purity(wa)) - math.log(spectrum_purity(wb)) - s_ab["renyi2"])
    return np.asarray(out)


def mi_profile_samples(
    geometry: CircuitGeometry,
    interval: IntervalSpec,
    T: int,
    trials: int,
    rng: RngLike,
    cuts=None,
    *,
    workers: int = 1,
    mem_cap: Optional[int] = DEFAULT_MEM_CAP,
) -> dict:
    """Mutual information across every cut of the interval, sharing one circuit per trial.

    Returns ``{"cuts": [...], "vn": array(trials, ncuts), "renyi2": array(trials, ncuts)}``
    in nats.
    """
    interval.validate(geometry, T)
    geometry.check_memory(mem_cap)
    cuts = list(range(0, interval.length + 1, 2)) if cuts is None else list(cuts)
    if any(not 0 <= x <= interval.length for x in cuts):
        raise InvalidArgument(f"cuts must lie in [0, {interval.length}]")
    fn = partial(
        _profile_trial,
        geometry=geometry,
        sites=interval.sites(geometry),
        T=T,
        cuts=cuts,
        root=root_stream(rng),
        mem_cap=mem_cap,
    )
    rows = np.asarray(run_trials(fn, trials, workers=workers))
    return {"cuts": cuts, "vn": rows[:, 0::2], "renyi2": rows[:, 1::2]}
