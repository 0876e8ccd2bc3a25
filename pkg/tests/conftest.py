import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

from treeopt.core.log import reset_logging
from treeopt.schemas.instance import Instance
from treeopt.services.instance_io import parse_instance

hypothesis_settings.register_profile(
    "treeopt",
    max_examples=80,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.load_profile("treeopt")

# Seven variables, four constraints; optimum 18 at (1,0,0,1,1,1,1)
EXAMPLE_TEXT = """\
# worked example
n 7
m 4
obj 2 3 1 5 4 6 1
con 1:3 2:4 3:1 <= 6
con 2:2 3:3 4:3 <= 5
con 2:2 5:3 <= 4
con 3:2 6:3 7:2 <= 5
"""

INFEASIBLE_TEXT = """\
n 2
m 1
obj 1 1
con 1:1 <= -1
"""


@pytest.fixture
def example_text() -> str:
    return EXAMPLE_TEXT


@pytest.fixture
def example() -> Instance:
    return parse_instance(EXAMPLE_TEXT)


@pytest.fixture
def infeasible() -> Instance:
    return parse_instance(INFEASIBLE_TEXT)


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.txt"
    path.write_text(EXAMPLE_TEXT)
    return path


@pytest.fixture
def infeasible_file(tmp_path):
    path = tmp_path / "infeasible.txt"
    path.write_text(INFEASIBLE_TEXT)
    return path


@pytest.fixture(autouse=True)
def reset_root_logger():
    yield
    reset_logging()
