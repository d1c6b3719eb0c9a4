"""Index arithmetic for the optical frequency comb.

Frequency index ``n`` and macronode index ``m`` are related by m = (-1)^n n; pump
indices follow from the macronode spacing of each OPO and the number of lattice copies.
Everything here is pure integer arithmetic on immutable values, except the two
human-readable frequency conversions which carry omega0 and the FSR as opaque scalars.
"""
from __future__ import annotations

from typing import List, Sequence, Tuple

from comb_cluster.domain import (
    CombIndexError,
    CompoundIndex,
    CopyLabelOutOfRange,
    EvenPumpIndex,
    InternalIndexError,
    NonpositiveFSR,
    OpoSpec,
)


def macronode_of(n: int) -> int:
    """Macronode index m = (-1)^n n of frequency index ``n``."""
    return n if n % 2 == 0 else -n


def frequency_of(m: int) -> int:
    """Frequency index of macronode ``m`` (the map is its own inverse)."""
    return m if m % 2 == 0 else -m


def pump_indices(spec: OpoSpec) -> Tuple[int, int]:
    """Return ``(p_Y, p_Z)`` for one OPO.

    A single copy uses p_Y = -p_Z = delta_m. With M > 1 copies the pumps become
    p_(Z,Y) = +/- M delta_m + (M - 1).
    """
    big_m = spec.copies
    if big_m == 1:
        p_y, p_z = spec.delta_m, -spec.delta_m
    else:
        p_z = big_m * spec.delta_m + (big_m - 1)
        p_y = -big_m * spec.delta_m + (big_m - 1)
    if p_y % 2 == 0 or p_z % 2 == 0:
        raise EvenPumpIndex(spec.delta_m, big_m, p_y, p_z)
    return p_y, p_z


def pump_frequency(p: int, omega0: float, delta_omega: float) -> float:
    """Pump frequency 2*omega0 + p*delta_omega for pump index ``p``."""
    if delta_omega <= 0:
        raise NonpositiveFSR(f"free spectral range must be positive, got {delta_omega}")
    return 2.0 * omega0 + p * delta_omega


def pump_index_of(frequency: float, omega0: float, delta_omega: float) -> int:
    """Nearest pump index for a pump ``frequency``; inverse of :func:`pump_frequency`."""
    if delta_omega <= 0:
        raise NonpositiveFSR(f"free spectral range must be positive, got {delta_omega}")
    return int(round((frequency - 2.0 * omega0) / delta_omega))


def compound_to_frequency(c: CompoundIndex, copies: int) -> int:
    """Frequency index of macronode ``c.m`` in lattice copy ``c.k``."""
    if not 0 <= c.k < copies:
        raise CopyLabelOutOfRange(f"copy label k={c.k} outside 0..{copies - 1}")
    base = copies * c.m + c.k
    if c.m % 2 == 0:
        return base
    return -base + (copies - 1)


def frequency_to_compound(n: int, copies: int) -> CompoundIndex:
    """Inverse of :func:`compound_to_frequency`; reduces to ``macronode_of`` for M = 1."""
    if copies < 1:
        raise CombIndexError(f"copies must be positive, got {copies}")

    # Even branch: n = M m + k
    m, k = divmod(n, copies)
    if m % 2 == 0:
        return CompoundIndex(m, k)

    # Odd branch: n = -(M m + k) + (M - 1)
    m, k = divmod(copies - 1 - n, copies)
    if m % 2 != 0:
        return CompoundIndex(m, k)

    raise InternalIndexError(f"no compound preimage for n={n}, M={copies}")


def lattice_offsets(circumferences: Sequence[int]) -> List[int]:
    """Macronode spacings for a hypercubic lattice: delta_m_j = M_1 * ... * M_j, M_1 = 1."""
    bad = [value for value in circumferences if value < 2]
    if bad:
        raise CombIndexError(f"lattice circumferences must be >= 2, got {bad}")
    offsets = [1]
    for circumference in circumferences:
        offsets.append(offsets[-1] * circumference)
    return offsets


def lattice_specs(circumferences: Sequence[int], copies: int = 1) -> List[OpoSpec]:
    """One :class:`OpoSpec` per lattice dimension sharing the copy count."""
    return [OpoSpec(delta_m=offset, copies=copies) for offset in lattice_offsets(circumferences)]


def window_macronodes(n_min: int, n_max: int) -> List[int]:
    """Sorted macronode indices covered by the frequency window n_min..n_max."""
    return sorted(macronode_of(n) for n in range(n_min, n_max + 1))


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0
