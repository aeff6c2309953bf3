"""
Runtime values for parameters, sets and ranges.

Data literals and model initializers both realize into these types; the
conformance helpers check a raw value against a declared type and shape.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class TupleValue:
    """A value of a declared tuple type."""
    type_name: str
    field_names: Tuple[str, ...]
    items: Tuple[Any, ...]

    def field(self, name: str) -> Any:
        return self.items[self.field_names.index(name)]

    def __str__(self) -> str:
        return "<" + ",".join(format_value(v) for v in self.items) + ">"


@dataclass(frozen=True)
class RangeValue:
    """Contiguous integer interval low..high, empty when low > high."""
    low: int
    high: int

    @property
    def elements(self) -> Tuple[int, ...]:
        return tuple(range(self.low, self.high + 1))

    def __len__(self) -> int:
        return max(0, self.high - self.low + 1)

    def __contains__(self, item) -> bool:
        return isinstance(item, int) and not isinstance(item, bool) and self.low <= item <= self.high

    def __str__(self) -> str:
        return f"{self.low}..{self.high}"


@dataclass(frozen=True)
class SetValue:
    """Ordered set; elements keep literal order."""
    elements: Tuple[Any, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, item) -> bool:
        return item in self.elements

    def __str__(self) -> str:
        return "{" + ",".join(format_value(v) for v in self.elements) + "}"


class ArrayValue:
    """An n-dimensional parameter array over realized index domains."""

    def __init__(self, domains: Sequence[Sequence[Any]], data: np.ndarray):
        self.domains = tuple(tuple(d) for d in domains)
        self.data = data
        self.positions: Tuple[Dict[Any, int], ...] = tuple(
            {element: i for i, element in enumerate(domain)} for domain in self.domains
        )

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(d) for d in self.domains)

    def locate(self, key: Tuple[Any, ...]) -> Tuple[int, ...]:
        """Positions of a key; raises KeyError carrying the offending dimension."""
        index = []
        for dim, element in enumerate(key):
            position = self.positions[dim].get(element)
            if position is None or isinstance(element, bool):
                raise KeyError(dim)
            index.append(position)
        return tuple(index)

    def get(self, key: Tuple[Any, ...]) -> Any:
        item = self.data[self.locate(key)]
        return item.item() if isinstance(item, np.generic) else item

    def items(self) -> Iterator[Tuple[Tuple[Any, ...], Any]]:
        for index in np.ndindex(*self.shape):
            key = tuple(self.domains[d][i] for d, i in enumerate(index))
            item = self.data[index]
            yield key, item.item() if isinstance(item, np.generic) else item


def format_value(value: Any) -> str:
    """Render a value the way it is written in source."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, float):
        return f"{value:g}"
    if isinstance(value, tuple):
        return "<" + ",".join(format_value(v) for v in value) + ">"
    if isinstance(value, list):
        return "[" + ",".join(format_value(v) for v in value) + "]"
    return str(value)


def abbreviate_number(value: Any) -> str:
    """Source form of a number; long integers keep only their leading and trailing digits."""
    try:
        text = format_value(value)
    except ValueError:
        return "a very large integer"
    if len(text) <= 24:
        return text
    return f"{text[:8]}...{text[-4:]} ({len(text.lstrip('-'))} digits)"


def format_key_element(value: Any) -> str:
    """Render one index element inside a flat name: strings unquoted."""
    if isinstance(value, str):
        return value
    if isinstance(value, TupleValue):
        return "<" + ",".join(format_key_element(v) for v in value.items) + ">"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def flat_name(symbol: str, key: Tuple[Any, ...]) -> str:
    if not key:
        return symbol
    return f"{symbol}[{','.join(format_key_element(k) for k in key)}]"


def type_name_of(value: Any) -> str:
    """Source-level type name of a raw or realized value."""
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, str):
        return "string"
    if isinstance(value, TupleValue):
        return value.type_name
    if isinstance(value, tuple):
        return "tuple"
    if isinstance(value, list):
        return "array"
    if isinstance(value, SetValue):
        return "set"
    if isinstance(value, RangeValue):
        return "range"
    return type(value).__name__


def is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def nesting_depth(value: Any) -> int:
    """Bracket depth along the first element of each level."""
    depth = 0
    while isinstance(value, list):
        depth += 1
        if not value:
            break
        value = value[0]
    return depth


def ragged_detail(value: List[Any], depth: int) -> str:
    """Describe the first rectangularity violation, or '' when rectangular."""
    if depth <= 1:
        return ""
    lengths = set()
    for i, row in enumerate(value, start=1):
        if not isinstance(row, list):
            return f"entry {i} is not a list"
        lengths.add(len(row))
    if len(lengths) > 1:
        return "rows have lengths " + ", ".join(str(n) for n in sorted(lengths))
    for row in value:
        detail = ragged_detail(row, depth - 1)
        if detail:
            return detail
    return ""


def extents_of(value: Any, depth: int) -> Tuple[int, ...]:
    extents = []
    for _ in range(depth):
        extents.append(len(value))
        value = value[0] if value else []
    return tuple(extents)


def format_extents(extents: Sequence[int]) -> str:
    return "x".join(str(n) for n in extents) if extents else "scalar"


def leaves(value: Any, depth: int) -> Iterator[Any]:
    if depth == 0:
        yield value
        return
    for item in value:
        yield from leaves(item, depth - 1)


NUMPY_DTYPES = {"int": np.int64, "float": np.float64, "boolean": np.bool_}


def build_array(domains: Sequence[Sequence[Any]], flat_values: List[Any], elem_type: str) -> ArrayValue:
    """Pack row-major leaf values into an ArrayValue."""
    shape = tuple(len(d) for d in domains)
    dtype = NUMPY_DTYPES.get(elem_type)
    if dtype is not None:
        data = np.array(flat_values, dtype=dtype).reshape(shape)
    else:
        data = np.empty(shape, dtype=object)
        for index, item in zip(np.ndindex(*shape), flat_values):
            data[index] = item
    return ArrayValue(domains, data)
