"""Deterministic toy event generation.

A downward gamma converts on a random tracker plane into an e+/e- pair.
Tracks propagate as straight lines, register a smeared hit on every plane
they cross after the vertex, and deposit most of their energy in the
calorimeter crystals under their exit point (or, for the occasional
upward-scattered positron, in the anti-coincidence tile it crosses on the
way out). Energy bookkeeping is exact: gamma_energy is defined as the
same float sum the conservation check computes.

Everything is a pure function of (seed, event_id, config).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .data import AcdHit, CalDeposit, Event, McTrack, OutlierTag, TrackHit, energy_total
from .detector import CAL_COLS, CAL_ROWS, DetectorModel, N_TOWERS, PLANE_ZS
from .fitting import fit_track

ENERGY_MIN_MEV = 20.0
ENERGY_MAX_MEV = 300000.0
OUTLIER_OFFSET_MM = 5.0
_UPWARD_PROB = 0.25
_MASK64 = (1 << 64) - 1
_MIX = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class GeneratorConfig:
    smear_sigma: float = 0.2  # mm, gaussian hit smearing
    outlier_prob: float = 0.1  # chance one hit of one track gets the 5 mm offset


def _event_rng(seed: int, event_id: int) -> random.Random:
    # Stable across processes: derive an integer child seed, never hash().
    mixed = (seed & _MASK64) ^ ((event_id * _MIX) & _MASK64)
    mixed = (mixed * 0xBF58476D1CE4E5B9 + event_id) & _MASK64
    return random.Random(mixed)


def _hits_for(rng, config, x0, y0, z0, slope_x, slope_y, plane_zs):
    hits = []
    for z in plane_zs:
        x = x0 + slope_x * (z - z0) + rng.gauss(0.0, config.smear_sigma)
        y = y0 + slope_y * (z - z0) + rng.gauss(0.0, config.smear_sigma)
        hits.append(TrackHit(z, x, y))
    hits.sort(key=lambda h: h.z)
    return hits


def generate_event(seed: int, event_id: int, config: GeneratorConfig = GeneratorConfig()) -> Event:
    rng = _event_rng(seed, event_id)
    detector = DetectorModel()

    energy_target = math.exp(
        rng.uniform(math.log(ENERGY_MIN_MEV), math.log(ENERGY_MAX_MEV))
    )
    tower = rng.randrange(N_TOWERS)
    cx, cy = detector.tower_center(tower)
    x0 = rng.uniform(cx - 80.0, cx + 80.0)
    y0 = rng.uniform(cy - 80.0, cy + 80.0)
    # Plane indices 3..7 leave >= 3 planes below and >= 2 above the vertex.
    plane_index = rng.randrange(3, 8)
    z0 = PLANE_ZS[plane_index]

    gamma_sx = rng.uniform(-0.1, 0.1)
    gamma_sy = rng.uniform(-0.1, 0.1)
    opening_x = rng.uniform(0.01, 0.1)
    opening_y = rng.uniform(-0.1, 0.1)
    fraction = rng.uniform(0.25, 0.75)
    positron_up = rng.random() < _UPWARD_PROB

    electron_energy = fraction * energy_target
    positron_energy = energy_target - electron_energy

    legs = [
        ("e-", electron_energy, gamma_sx + opening_x, gamma_sy + opening_y, False),
        ("e+", positron_energy, gamma_sx - opening_x, gamma_sy - opening_y, positron_up),
    ]

    tracks = []
    for particle_id, energy, sx, sy, upward in legs:
        if upward:
            planes = PLANE_ZS[plane_index + 1 :]
            dz = 1.0
        else:
            planes = PLANE_ZS[:plane_index]
            dz = -1.0
        norm = math.sqrt(sx * sx + sy * sy + 1.0)
        direction = (sx * dz / norm, sy * dz / norm, dz / norm)
        hits = _hits_for(rng, config, x0, y0, z0, sx, sy, planes)
        tracks.append(McTrack(particle_id, energy, direction, hits))

    outlier = None
    if rng.random() < config.outlier_prob:
        # Only tracks that stay fittable after a removal; gives refit work.
        candidates = [i for i, t in enumerate(tracks) if len(t.hits) >= 3]
        track_index = rng.choice(candidates)
        hits = tracks[track_index].hits
        hit_index = rng.randrange(len(hits))
        sign = 1.0 if rng.random() < 0.5 else -1.0
        hits[hit_index].x += sign * OUTLIER_OFFSET_MM
        outlier = OutlierTag(track_index, hit_index)

    deposits = {}
    acd_hits = []
    for index, (_, _, sx, sy, upward) in enumerate(legs):
        track = tracks[index]
        deposit_fraction = rng.uniform(0.6, 0.9)
        if upward:
            deposited = deposit_fraction * track.energy
            acd_hits.append(AcdHit(tower, deposited))
            track.energy -= deposited
            continue
        exit_z = 0.0
        xe = x0 + sx * (exit_z - z0)
        ye = y0 + sy * (exit_z - z0)
        shares = _crystal_shares(detector, tower, xe, ye)
        budget = deposit_fraction * track.energy
        spent = 0.0
        for crystal_id, weight in shares:
            amount = weight * budget
            deposits[crystal_id] = deposits.get(crystal_id, 0.0) + amount
            spent += amount
        track.energy -= spent

    for track in tracks:
        track.fit = fit_track(track.hits)

    event = Event(
        event_id=event_id,
        gamma_energy=0.0,
        vertex=(x0, y0, z0),
        tracks=tracks,
        cal_deposits=[CalDeposit(cid, deposits[cid]) for cid in sorted(deposits)],
        acd_hits=acd_hits,
        outlier=outlier,
    )
    # Exact bookkeeping: define the gamma energy as the checker's own sum.
    event.gamma_energy = energy_total(event)
    return event


def _crystal_shares(detector: DetectorModel, tower: int, x: float, y: float):
    """Split a deposit bilinearly over the hit crystal and its in-tower
    neighbours (at most 4 cells); weights sum to ~1."""
    u, v = detector.crystal_grid_position(tower, x, y)
    cu = min(CAL_COLS - 1, max(0, int(u)))
    cv = min(CAL_ROWS - 1, max(0, int(v)))
    du = u - (cu + 0.5)
    dv = v - (cv + 0.5)
    nu = cu + (1 if du > 0 else -1)
    nv = cv + (1 if dv > 0 else -1)
    wu = abs(du)
    wv = abs(dv)
    cells = {}
    for col, weight_u in ((cu, 1.0 - wu), (nu, wu)):
        if not 0 <= col < CAL_COLS:
            col = cu  # fold the share back at the tower edge
        for row, weight_v in ((cv, 1.0 - wv), (nv, wv)):
            if not 0 <= row < CAL_ROWS:
                row = cv
            cid = detector.crystal_id(tower, col, row)
            cells[cid] = cells.get(cid, 0.0) + weight_u * weight_v
    return sorted(cells.items())
