import sys
from pathlib import Path

import pytest

from geocoherence.data import Dataset, parse_trace_file

sys.path.insert(0, str(Path(__file__).parent))

# Seven samples over two users whose hour-window groupings are known by
# hand; used throughout as the worked-example dataset.
WORKED_EXAMPLE_CSV = """\
user_id,timestamp,latitude,longitude
user1,2020/01/16 10:55,35.650000,139.700000
user1,2020/01/17 11:55,35.660000,139.710000
user1,2020/01/17 12:50,35.640000,139.720000
user2,2020/01/16 21:30,35.700000,139.800000
user2,2020/01/17 22:10,35.710000,139.810000
user2,2020/01/18 21:45,35.720000,139.790000
user2,2020/01/19 20:10,35.730000,139.820000
"""

# Position -> expected coherence members at window radius 1, daily mode.
WORKED_EXAMPLE_MEMBERS = {
    0: [1],
    1: [0, 2],
    2: [1],
    3: [4, 5, 6],
    4: [3, 5],
    5: [3, 4, 6],
    6: [3, 5],  # the hour-20 sample pairs with the two hour-21 samples
}


@pytest.fixture
def worked_example() -> Dataset:
    dataset, rejects = parse_trace_file(WORKED_EXAMPLE_CSV, "csv", strict=True)
    assert not rejects
    return dataset
