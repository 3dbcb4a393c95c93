"""Desk-scale simulator of a single-hop cognitive-radio sensor link.

Channels carry licensed-user traffic modeled as independent alternating
busy/idle renewal processes with exponential period lengths.  Per packet,
a channel-bonding scheme picks a contiguous run of 2 or 3 idle channels;
the remaining-idle-time aware schemes rank candidate runs by the minimum
expected remaining idle time of their members.  The kernel scores packet
delivery, harmful interference, channel switching, and transmit energy.
"""

from .bonding import (
    Bond,
    SCHEME_NAMES,
    SelectionContext,
    SelectionResult,
    agile_select,
    classify_contiguous,
    enumerate_contiguous_sets,
    ip_guard_drops,
    knows_select,
    pracb_select,
    ritcb_select,
    swa_select,
)
from .errors import ConfigurationError
from .metrics import MetricsReport, Outcome, aggregate, transmit_energy_per_packet
from .prmodel import (
    ChannelParams,
    ChannelProcess,
    REGIMES,
    RegimePreset,
    regime_preset,
    sample_period,
    truncate_regime,
)
from .sensing import (
    SensingErrorModel,
    SensingSnapshot,
    p_off,
    p_on,
    remaining_idle_time,
    sense,
)
from .simkernel import PacketRecord, SimConfig, resolve_transmission, run

__version__ = "0.1.0"

__all__ = [
    "Bond",
    "ChannelParams",
    "ChannelProcess",
    "ConfigurationError",
    "MetricsReport",
    "Outcome",
    "PacketRecord",
    "REGIMES",
    "RegimePreset",
    "SCHEME_NAMES",
    "SelectionContext",
    "SelectionResult",
    "SensingErrorModel",
    "SensingSnapshot",
    "SimConfig",
    "aggregate",
    "agile_select",
    "classify_contiguous",
    "enumerate_contiguous_sets",
    "ip_guard_drops",
    "knows_select",
    "p_off",
    "p_on",
    "pracb_select",
    "regime_preset",
    "remaining_idle_time",
    "resolve_transmission",
    "ritcb_select",
    "run",
    "sample_period",
    "sense",
    "swa_select",
    "transmit_energy_per_packet",
    "truncate_regime",
]
