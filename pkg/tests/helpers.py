"""Random distributions and small fixtures shared by the test modules."""

from __future__ import annotations

import numpy as np

from stateic import channel as ch


def dirichlet_table(rng, *shape):
    return rng.dirichlet(np.ones(shape[-1]), size=shape[:-1])


def random_channel(rng, cs=2, cx=(2, 2), cy=(2, 2)) -> ch.ChannelSpec:
    law = rng.dirichlet(np.ones(cy[0] * cy[1]), size=(cs, cx[0], cx[1]))
    return ch.ChannelSpec(rng.dirichlet(np.ones(cs)), law.reshape(cs, cx[0], cx[1], cy[0], cy[1]))


def random_dist(rng, channel, scheme=1, cards=None):
    c = {"Q": 1, "U1": 2, "V1": 2, "U2": 2, "V2": 2}
    c.update(cards or {})
    s = channel.card("S")
    maps = [ch.EncoderMap(rng.integers(0, channel.card(f"X{j}"), (c[f"U{j}"], c[f"V{j}"], s)),
                          channel.card(f"X{j}")) for j in (1, 2)]
    pq = dirichlet_table(rng, c["Q"])
    if scheme == 1:
        return ch.Scheme1Distribution(pq, *(dirichlet_table(rng, c["Q"], s, c[n]) for n in ("U1", "V1", "U2", "V2")),
                                      *maps)
    return ch.Scheme2Distribution(pq, dirichlet_table(rng, c["Q"], s, c["U1"]),
                                  dirichlet_table(rng, c["Q"], s, c["U1"], c["V1"]),
                                  dirichlet_table(rng, c["Q"], s, c["U2"]),
                                  dirichlet_table(rng, c["Q"], s, c["U2"], c["V2"]), *maps)


def copy_distribution(channel):
    """V1 uniform binary and X1 = V1; every other auxiliary unary."""
    s = channel.card("S")
    one = np.ones((1, s, 1))
    f1 = ch.EncoderMap.from_function(lambda u, v, st: v, 1, 2, s, channel.card("X1"))
    f2 = ch.EncoderMap.constant(1, 1, s, channel.card("X2"))
    return ch.Scheme1Distribution(np.ones(1), one, np.full((1, s, 2), 0.5), one, one, f1, f2)
