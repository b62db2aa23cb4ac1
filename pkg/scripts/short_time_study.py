"""q(-,+) at small tau: engine value against the current term, the edge term and the full expansion."""

import numpy as np

from qarrival.analytic import short_time_expansion
from qarrival.states import GaussianPacket, GridSpec, WavepacketState, current_at_origin
from qarrival.twotime import quasi_probability


def main():
    grid = GridSpec(30.0, 2**18)
    mover = WavepacketState.single(-0.3, 1.0, 1.5)
    node = WavepacketState.normalized([1, -1], [GaussianPacket(1, 1, 0), GaussianPacket(-1, 1, 0)])
    J = current_at_origin(mover)
    print("state,tau,q_mp,q_over_half_J_tau,(q-edge)/(half_J_tau),expansion")
    for tau in np.geomspace(2.5e-4, 1.6e-2, 7):
        q = quasi_probability(mover, 0.0, tau, grid=grid)[(-1, 1)]
        est = short_time_expansion(mover, tau)
        print(f"moving,{tau:.3e},{q:.8e},{q / (0.5 * J * tau):.5f},{(q - est.edge) / (0.5 * J * tau):.5f},{est.value:.8e}")
    for tau in np.geomspace(2.5e-4, 1.6e-2, 7):
        q = quasi_probability(node, 0.0, tau, grid=grid)[(-1, 1)]
        print(f"node,{tau:.3e},{q:.8e},,,{short_time_expansion(node, tau).value:.8e}")


if __name__ == "__main__":
    main()
