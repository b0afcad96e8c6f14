"""Monte-Carlo BLER harness, configuration and complexity benchmark."""

from .config import ChannelConfig, CodeConfig, ReceiverConfig, SimConfig
from .sim import (
    CSV_COLUMNS,
    BlerPoint,
    Crossing,
    Link,
    find_crossing,
    metadata,
    read_csv,
    run_point,
    run_sweep,
    write_csv,
)

__all__ = [
    "CSV_COLUMNS",
    "BlerPoint",
    "ChannelConfig",
    "CodeConfig",
    "Crossing",
    "Link",
    "ReceiverConfig",
    "SimConfig",
    "find_crossing",
    "metadata",
    "read_csv",
    "run_point",
    "run_sweep",
    "write_csv",
]
