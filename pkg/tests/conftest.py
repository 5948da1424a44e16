from pathlib import Path

import pytest

from irv_commlab.ballots import Profile, parse_profile

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"

# profiles P and Q of the worked m = 3 example, one tuple per voter
P_VOTERS = ((0, 2, 1), (0, 2, 1), (1, 2, 0), (1, 2, 0), (2, 0, 1), (2, 1, 0))
Q_VOTERS = ((0, 2, 1), (0, 2, 1), (1, 2, 0), (2, 0, 1), (1, 2, 0), (2, 1, 0))
MIXED_VOTERS = ((0, 2, 1), (0, 2, 1), (1, 2, 0), (2, 0, 1), (2, 0, 1), (2, 1, 0))

SP18_GROUPS = [
    (4, (0, 1, 2, 3, 4)),
    (2, (1, 0, 2, 3, 4)),
    (2, (2, 1, 0, 3, 4)),
    (3, (2, 3, 4, 1, 0)),
    (4, (3, 4, 2, 1, 0)),
    (3, (4, 3, 2, 1, 0)),
]

STV_EXAMPLE = [(4, (0, 2, 1, 3)), (3, (1, 2, 0, 3)), (2, (3, 1, 2, 0))]


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def P():
    return parse_profile((DATA / "p_fooling.profile").read_text())


@pytest.fixture
def Q():
    return parse_profile((DATA / "q_fooling.profile").read_text())


@pytest.fixture
def sp18():
    return Profile.from_groups(SP18_GROUPS)


@pytest.fixture
def stv_example():
    return Profile.from_groups(STV_EXAMPLE)
