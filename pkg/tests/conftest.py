import numpy as np
import pytest

from tapmein.tapcore import RawTap, RawTapSequence, SampleMeta


def build_sequence(downs, ups, pressures=None, sizes=None, start=0.0, meta=None):
    """Assemble a valid RawTapSequence from duration lists."""
    l = len(downs)
    pressures = pressures if pressures is not None else [0.5] * l
    sizes = sizes if sizes is not None else [0.5] * l
    taps = []
    t = float(start)
    for i in range(l):
        down, up = t, t + float(downs[i])
        taps.append(RawTap(down, up, float(pressures[i]), float(sizes[i])))
        t = up + (float(ups[i]) if i < l - 1 else 0.0)
    return RawTapSequence(taps, meta=meta)


def random_sequence(rng, l, meta=None):
    return build_sequence(
        downs=rng.uniform(40, 400, l),
        ups=rng.uniform(40, 700, l - 1),
        pressures=rng.uniform(0.05, 0.95, l),
        sizes=rng.uniform(0.05, 0.95, l),
        meta=meta,
    )


def melody_samples(rng, l, count, jitter=0.03, pressure=0.6, size=0.5, condition="sitting"):
    """Tight genuine-like renditions of one random melody."""
    downs = rng.uniform(80, 300, l)
    ups = rng.uniform(80, 500, l - 1)
    out = []
    for _ in range(count):
        out.append(
            build_sequence(
                downs=np.maximum(downs * (1 + jitter * rng.standard_normal(l)), 1.0),
                ups=np.maximum(ups * (1 + jitter * rng.standard_normal(l - 1)), 1.0),
                pressures=np.clip(pressure + 0.02 * rng.standard_normal(l), 0, 1),
                sizes=np.clip(size + 0.02 * rng.standard_normal(l), 0, 1),
                meta=SampleMeta(condition=condition),
            )
        )
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
