"""Component registry, configuration presets and the ablation variants."""

from __future__ import annotations

import itertools

from hc2.arsenal.ensemble import Arsenal, ArsenalConfig, Rocket
from hc2.drcif.forest import DrCIF, DrcifConfig
from hc2.stc.classifier import STC, StcConfig
from hc2.tde.ensemble import TDE, TdeConfig

__all__ = [
    "COMPONENTS",
    "PRESETS",
    "VARIANTS",
    "all_subsets",
    "component_index",
    "component_config",
    "make_component",
    "normalise_components",
    "variant_components",
]

# the order fixes each component's seed child index
COMPONENTS = ("TDE", "DrCIF", "Arsenal", "STC")

_CLASSES = {"TDE": TDE, "DrCIF": DrCIF, "Arsenal": Arsenal, "STC": STC, "ROCKET": Rocket}

PRESETS = {
    # full reference sizes
    "default": {
        "TDE": TdeConfig(),
        "DrCIF": DrcifConfig(),
        "Arsenal": ArsenalConfig(),
        "STC": StcConfig(),
        "ROCKET": ArsenalConfig(n_members=1, n_kernels=10_000),
    },
    # small enough to run the whole bundled suite on a laptop
    "desk": {
        "TDE": TdeConfig(n_parameter_samples=30, max_ensemble_size=10, n_random=20),
        "DrCIF": DrcifConfig(n_trees=50),
        "Arsenal": ArsenalConfig(n_members=10, n_kernels=1000),
        "STC": StcConfig(n_candidates=2000, n_trees=50),
        "ROCKET": ArsenalConfig(n_members=1, n_kernels=10_000),
    },
}

# two and three component subsets, following the usual HC-n ablation names
_VARIANT_TABLE = {
    "HC-1": ("DrCIF", "Arsenal"),
    "HC-2": ("DrCIF", "STC"),
    "HC-3": ("DrCIF", "TDE"),
    "HC-4": ("Arsenal", "STC"),
    "HC-5": ("Arsenal", "TDE"),
    "HC-6": ("STC", "TDE"),
    "HC-7": ("DrCIF", "Arsenal", "STC"),
    "HC-8": ("DrCIF", "Arsenal", "TDE"),
    "HC-9": ("DrCIF", "STC", "TDE"),
    "HC-10": ("Arsenal", "STC", "TDE"),
    "HC2": COMPONENTS,
}
VARIANTS = {k: tuple(c for c in COMPONENTS if c in v) for k, v in _VARIANT_TABLE.items()}

_ALIASES = {c.lower(): c for c in _CLASSES}


def component_index(cid: str) -> int:
    return COMPONENTS.index(cid)


def normalise_components(names) -> tuple[str, ...]:
    """Canonical ids in registry order; accepts any case and a comma-separated string."""
    if isinstance(names, str):
        names = [n for n in names.split(",") if n.strip()]
    out = set()
    for n in names:
        key = n.strip().lower()
        if key not in _ALIASES or _ALIASES[key] not in COMPONENTS:
            raise ValueError(f"unknown component {n!r}; choose from {', '.join(COMPONENTS)}")
        out.add(_ALIASES[key])
    if not out:
        raise ValueError("at least one component must be enabled")
    return tuple(c for c in COMPONENTS if c in out)


def variant_components(name: str) -> tuple[str, ...]:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown variant {name!r}") from None


def component_config(cid: str, preset: str = "default"):
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[preset][cid]


def make_component(cid: str, preset: str = "default", config=None):
    """A fresh, unfitted component (``ROCKET`` is accepted as a standalone preset)."""
    if cid not in _CLASSES:
        raise ValueError(f"unknown component {cid!r}")
    return _CLASSES[cid](config if config is not None else component_config(cid, preset))


def all_subsets(min_size: int = 2):
    """Every subset of the components with at least ``min_size`` members, in registry order."""
    for k in range(min_size, len(COMPONENTS) + 1):
        yield from itertools.combinations(COMPONENTS, k)
