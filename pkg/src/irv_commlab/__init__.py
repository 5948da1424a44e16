"""Communication complexity toolkit for instant-runoff voting and STV."""

from .ballots import (
    Profile,
    ProfileError,
    is_single_peaked,
    mix,
    parse_profile,
    random_profile,
    random_single_peaked_profile,
    serialize_profile,
)
from .elicitation import Transcript, run_ppr, run_sp_ppr, run_stv_ppr, transcript_bound_check
from .fooling import (
    FoolingSpec,
    asymptotic_estimate,
    canonical_fooling_profile,
    count_signature,
    enumerate_fooling_profiles,
    fooling_cardinality,
    log_cardinality,
    representative,
    signature,
    stv_representative,
    stv_signature,
    tie_breaking_block,
    verify_fooling_pair,
    verify_fooling_set,
)
from .rules import (
    AvgConfig,
    StvConfig,
    TieBreak,
    TallyTrace,
    droop_quota,
    irv_average_tally,
    irv_tally,
    stv_tally,
)

__version__ = "0.1.0"
