"""Hand-built scenarios for unit tests that need exact, known quantities."""

import numpy as np

from jamsim.channel import PathSet, Scenario


def manual_scenario(
    effective_signals,
    sigma2=1.0,
    jammer_channel=None,
    jammer_antennas=1,
    jammer_power=1.0,
    bs_antennas=None,
):
    """Scenario whose k-th effective signal H_k w_k equals the given vector.

    Channels are built as rank-1 outer products with unit precoders, so the
    SINR formulas can be checked against closed-form values.
    """
    signals = [np.asarray(s, dtype=complex) for s in effective_signals]
    n_b = bs_antennas or len(signals[0])
    n_a = 2
    channels = []
    precoders = []
    for s in signals:
        h = np.zeros((n_b, n_a), dtype=complex)
        h[:, 0] = s
        channels.append(h)
        w = np.zeros(n_a, dtype=complex)
        w[0] = 1.0
        precoders.append(w)
    if jammer_channel is None:
        jammer_channel = np.zeros((n_b, jammer_antennas), dtype=complex)
    gains = np.zeros(1, dtype=complex)
    paths = PathSet(gains=gains, aoas=np.zeros(1), aods=np.zeros(1))
    a_b = np.ones((n_b, 1), dtype=complex)
    a_j = np.ones((jammer_antennas, 1), dtype=complex)
    return Scenario(
        channels=tuple(channels),
        precoders=tuple(precoders),
        jammer_channel=np.asarray(jammer_channel, dtype=complex),
        bs_jammer_manifold=a_b,
        jammer_gains=gains,
        jammer_tx_manifold=a_j,
        user_paths=(paths,) * len(signals),
        jammer_paths=paths,
        user_powers=tuple(float(np.linalg.norm(w) ** 2) for w in precoders),
        jammer_power=jammer_power,
        sigma2=sigma2,
        spacing=0.5,
    )
