"""
What a packet costs
===================

Transmit energy grows with the square of the distance, receive energy does not.
"""

import numpy as np

from mlcsim import EnergyModel, rx_cost, tx_cost

m = EnergyModel()

# a 500 bit data packet over a few typical hop lengths
for d in (0, 50, 100, 200, 400, 700):
    print(f"{d:4d} m  tx {tx_cost(m.data_bits, d, m) * 1e6:8.1f} uJ")
print(f"receive   {rx_cost(m.data_bits, m) * 1e6:8.1f} uJ")

# the amplifier term overtakes the electronics at sqrt(e_elec / eps_amp)
print("crossover distance:", np.sqrt(m.e_elec / m.eps_amp).round(1), "m")

# 0.1 J buys this many direct transmissions from a node 400 m from the sink
print("packets per battery at 400 m:", int(0.1 // tx_cost(m.data_bits, 400, m)))
