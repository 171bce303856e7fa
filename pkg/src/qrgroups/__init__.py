"""Finite quasirandom groups: Cayley tables, character degrees, configuration counts."""

from .cache import cayley_cache_read, cayley_cache_write, load_group
from .characters import CharacterTable, character_table, class_matrices, quasirandomness_degree
from .field import PrimePowerField, field_build
from .generators import GeneratorSpec, generate_set, parse_generator
from .groups import (
    GroupTable,
    ProductView,
    build_cyclic,
    build_product,
    build_psl2,
    build_sl2,
    build_symmetric,
    conjugacy_classes,
    parse_group_spec,
)
from .measure import (
    GroupFunction,
    Partition,
    chu_check,
    class_projection,
    cond_expectation,
    quadruple_holder_bound,
)
from .patterns import (
    IndicatorSet,
    corner_count,
    corner_profile,
    mixing_discrepancy,
    return_set,
    triangle_count,
    triangle_profile,
)
from .syndetic import CoverResult, covering_number

__version__ = "0.1.0"
