"""Shared fixtures for the test suite: the frozen generated-complex corpus
and a tiny exception helper so tests can stay plain-assert."""

from functools import lru_cache

from diracsp import NgfConfig, SimplicialComplex, ngf_generate

# 20 generated complexes, 10 to 200 triangles, seeds frozen.
CORPUS_SPECS = tuple((10 * (i + 1), 100 + i) for i in range(20))


@lru_cache(maxsize=1)
def corpus() -> tuple[SimplicialComplex, ...]:
    return tuple(ngf_generate(NgfConfig(target_triangles=t, seed=s))
                 for t, s in CORPUS_SPECS)


@lru_cache(maxsize=1)
def small_corpus() -> tuple[SimplicialComplex, ...]:
    """Corpus members small enough for dense whole-operator oracles."""
    return tuple(c for c in corpus() if c.total_dim <= 300)


def raises(exc_type, fn, *args, **kwargs) -> bool:
    """True when fn(*args, **kwargs) raises exactly this exception family."""
    try:
        fn(*args, **kwargs)
    except exc_type:
        return True
    except Exception:
        return False
    return False
