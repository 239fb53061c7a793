"""Name-based composition of state-space blocks."""

import logging
from collections import Counter
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from mtdc_hinf.domain.exceptions import WiringError
from mtdc_hinf.domain.models import StateSpaceModel

logger = logging.getLogger(__name__)

# A block input is fed either by one named output or by a weighted sum of outputs.
Connection = Union[str, Mapping[str, float]]

SINGULAR_LOOP_CONDITION = 1e12


def append(systems: Sequence[StateSpaceModel]) -> StateSpaceModel:
    """Block-diagonal union of independent systems.

    Raises:
        WiringError: If two systems share a channel name.
    """
    if not systems:
        return StateSpaceModel(a=np.zeros((0, 0)), b=np.zeros((0, 0)), c=np.zeros((0, 0)), d=np.zeros((0, 0)))
    states = [name for system in systems for name in system.state_names]
    inputs = [name for system in systems for name in system.input_names]
    outputs = [name for system in systems for name in system.output_names]
    for kind, names in (("state", states), ("input", inputs), ("output", outputs)):
        duplicates = sorted(name for name, count in Counter(names).items() if count > 1)
        if duplicates:
            raise WiringError(duplicates, reason=f"{kind} name used by more than one block")
    return StateSpaceModel(
        a=_block_diag([system.a for system in systems], len(states), len(states)),
        b=_block_diag([system.b for system in systems], len(states), len(inputs)),
        c=_block_diag([system.c for system in systems], len(outputs), len(states)),
        d=_block_diag([system.d for system in systems], len(outputs), len(inputs)),
        state_names=tuple(states),
        input_names=tuple(inputs),
        output_names=tuple(outputs),
    )


def _block_diag(blocks: List[np.ndarray], rows: int, columns: int) -> np.ndarray:
    if rows == 0 or columns == 0:
        return np.zeros((rows, columns))
    result = np.zeros((rows, columns))
    row = column = 0
    for block in blocks:
        height, width = block.shape
        result[row : row + height, column : column + width] = block
        row += height
        column += width
    return result


def interconnect(
    systems: Sequence[StateSpaceModel],
    connections: Mapping[str, Connection],
    inputs: Sequence[str],
    outputs: Sequence[str],
    grounded: Iterable[str] = (),
) -> StateSpaceModel:
    """Close named feedback connections between blocks.

    Every block input must be resolved exactly once: by ``connections`` (fed from block
    outputs), by ``inputs`` (exposed as an external input of the same name) or by
    ``grounded`` (held at zero).

    Args:
        systems: Blocks with globally unique channel names.
        connections: Block input name mapped to an output name or to {output: gain}.
        inputs: Block inputs exposed as external inputs, in order.
        outputs: Block outputs exposed as external outputs, in order.
        grounded: Block inputs held at zero.

    Returns:
        The interconnected system with the states of all blocks in order.

    Raises:
        WiringError: On unresolved, unknown or doubly specified signals, or when the
            algebraic loop through the feedthrough terms is singular.
    """
    stacked = append(systems)
    grounded = tuple(grounded)
    input_index = {name: index for index, name in enumerate(stacked.input_names)}
    output_index = {name: index for index, name in enumerate(stacked.output_names)}

    # Every block input resolved exactly once
    resolution = Counter(list(connections) + list(inputs) + list(grounded))
    doubled = sorted(name for name, count in resolution.items() if count > 1)
    if doubled:
        raise WiringError(doubled, reason="signal resolved more than once")
    unknown = sorted(name for name in resolution if name not in input_index)
    unknown += sorted(name for name in outputs if name not in output_index)
    for source in connections.values():
        names = [source] if isinstance(source, str) else list(source)
        unknown += [name for name in names if name not in output_index]
    if unknown:
        raise WiringError(unknown, reason="no block provides this channel")
    unresolved = [name for name in stacked.input_names if name not in resolution]
    if unresolved:
        raise WiringError(unresolved, reason="block input neither connected, external nor grounded")

    n_u, n_y = stacked.n_inputs, stacked.n_outputs
    feedback = np.zeros((n_u, n_y))
    for target, source in connections.items():
        gains: Mapping[str, float] = {source: 1.0} if isinstance(source, str) else source
        for name, gain in gains.items():
            feedback[input_index[target], output_index[name]] += gain
    external = np.zeros((n_u, len(inputs)))
    for column, name in enumerate(inputs):
        external[input_index[name], column] = 1.0

    loop = np.eye(n_u) - feedback @ stacked.d
    if n_u and np.linalg.cond(loop) > SINGULAR_LOOP_CONDITION:
        raise WiringError(sorted(connections), reason="algebraic loop is singular")
    closing = np.linalg.solve(loop, np.hstack([feedback @ stacked.c, external])) if n_u else np.zeros((0, 0))
    state_gain = closing[:, : stacked.n_states] if n_u else np.zeros((0, stacked.n_states))
    input_gain = closing[:, stacked.n_states :] if n_u else np.zeros((0, len(inputs)))

    rows = [output_index[name] for name in outputs]
    a = stacked.a + stacked.b @ state_gain
    b = stacked.b @ input_gain
    c = (stacked.c + stacked.d @ state_gain)[rows, :]
    d = (stacked.d @ input_gain)[rows, :]
    logger.debug(
        "Interconnected %d blocks into %d states, %d inputs, %d outputs",
        len(systems),
        stacked.n_states,
        len(inputs),
        len(outputs),
    )
    return StateSpaceModel(
        a=a,
        b=b,
        c=c,
        d=d,
        state_names=stacked.state_names,
        input_names=tuple(inputs),
        output_names=tuple(outputs),
    )


def rename(
    system: StateSpaceModel,
    inputs: Optional[Mapping[str, str]] = None,
    outputs: Optional[Mapping[str, str]] = None,
    states: Optional[Mapping[str, str]] = None,
) -> StateSpaceModel:
    """Rename channels; names absent from a mapping are kept.

    Raises:
        WiringError: If a mapping names a channel the system does not have.
    """
    updates: Dict[str, tuple] = {}
    for key, names, mapping in (
        ("input_names", system.input_names, inputs),
        ("output_names", system.output_names, outputs),
        ("state_names", system.state_names, states),
    ):
        if not mapping:
            continue
        missing = sorted(set(mapping) - set(names))
        if missing:
            raise WiringError(missing, reason=f"cannot rename missing {key.split('_')[0]} channels")
        updates[key] = tuple(mapping.get(name, name) for name in names)
    if not updates:
        return system
    return StateSpaceModel.model_validate({**_fields(system), **updates})


def _fields(system: StateSpaceModel) -> Dict[str, object]:
    return {
        "a": system.a,
        "b": system.b,
        "c": system.c,
        "d": system.d,
        "state_names": system.state_names,
        "input_names": system.input_names,
        "output_names": system.output_names,
    }


def static_gain(gain: np.ndarray, input_names: Sequence[str], output_names: Sequence[str]) -> StateSpaceModel:
    """Memoryless block y = gain u."""
    gain = np.atleast_2d(np.asarray(gain, dtype=float))
    return StateSpaceModel(
        a=np.zeros((0, 0)),
        b=np.zeros((0, gain.shape[1])),
        c=np.zeros((gain.shape[0], 0)),
        d=gain,
        state_names=(),
        input_names=tuple(input_names),
        output_names=tuple(output_names),
    )


def integrator_bank(channels: Sequence[str], suffix: str, prefix: str = "int:") -> StateSpaceModel:
    """Pure integrators: state ``prefix + c`` integrates input ``c``, output ``c + suffix``."""
    size = len(channels)
    return StateSpaceModel(
        a=np.zeros((size, size)),
        b=np.eye(size),
        c=np.eye(size),
        d=np.zeros((size, size)),
        state_names=tuple(prefix + name for name in channels),
        input_names=tuple(channels),
        output_names=tuple(name + suffix for name in channels),
    )

