import json
import random

import pytest

VERTICAL_CURVE_OBJ = {"pitch_mm": 30.0, "points": [[6.0, -9.0], [6.0, 75.0]]}

# canonical zig-zag: alternating folds walking one row band to the right
ZIGZAG_FOLDS = ["L", "R", "L", "R", "L", "R"]


@pytest.fixture
def rng():
    return random.Random(20250819)


@pytest.fixture
def vertical_curve_obj():
    return json.loads(json.dumps(VERTICAL_CURVE_OBJ))


def zigzag_plan_obj():
    """PlanFile for the canonical anchor walking a row band rightward."""
    from foldchain.geometry import AnchorPose, strip_from_plan
    from foldchain.planner import FoldPlan
    from foldchain.geometry import FoldDirection
    from foldchain import files

    plan = FoldPlan(
        directions=tuple(FoldDirection(f) for f in ZIGZAG_FOLDS),
        anchor=AnchorPose.canonical(),
    )
    strip = strip_from_plan(plan)
    return files.plan_to_obj(plan, strip, 30.0)


@pytest.fixture
def zigzag_plan():
    return zigzag_plan_obj()
