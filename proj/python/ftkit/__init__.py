# Copyright 2026 The ftkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python interface to the ftkit fine-tuning toolkit.

Inputs are file contents (str); structured results are plain dicts/lists.
"""

import json
from typing import Dict, List, Sequence, Tuple

from . import _ftkit
from ._ftkit import ContractViolation, EmptyResultError, Error

__all__ = [
    "ContractViolation",
    "EmptyResultError",
    "Error",
    "evaluate",
    "filter_dataset",
    "iou",
    "list_categories",
    "parse_config",
    "rewrite_prototxt",
    "run_cli",
    "select_demo",
    "validate",
]


def list_categories(instances: str) -> List[dict]:
    """Category catalog of a COCO instances file, sorted by id."""
    return json.loads(_ftkit.list_categories(instances))


def validate(instances: str) -> dict:
    """Integrity report: {"valid", "errors", "warnings", "findings"}."""
    return json.loads(_ftkit.validate(instances))


def filter_dataset(instances: str, cat_ids: Sequence[int]) -> Tuple[str, dict, dict]:
    """Returns (filtered instances JSON, category map, filter report)."""
    text, cat_map, report = _ftkit.filter(instances, list(cat_ids))
    return text, json.loads(cat_map), json.loads(report)


def parse_config(text: str) -> dict:
    """Reads CAT_IDS, SEED and DEMO_COUNT; other keys land in "extra"."""
    return json.loads(_ftkit.parse_config(text))


def rewrite_prototxt(text: str, k: int, verify: bool = False) -> Tuple[str, Dict[str, int]]:
    """Rewrites class-count fields for k categories; returns (text, applied)."""
    out, applied = _ftkit.rewrite_prototxt(text, k, verify)
    return out, json.loads(applied)


def select_demo(instances: str, cat_ids: Sequence[int], n: int, seed: int) -> List[str]:
    """File names of n distinct eligible images, in draw order."""
    return _ftkit.select_demo(instances, list(cat_ids), n, seed)


def evaluate(instances: str, detections: str, cat_ids: Sequence[int]) -> dict:
    """COCO box AP per category and threshold plus the mean."""
    return json.loads(_ftkit.evaluate(instances, detections, list(cat_ids)))


def iou(a: Sequence[float], b: Sequence[float]) -> float:
    """Intersection over union of two [x, y, w, h] boxes."""
    return _ftkit.iou(list(a), list(b))


def run_cli(args: Sequence[str]) -> Tuple[int, str, str]:
    """Runs the command-line tool in process; returns (exit code, stdout, stderr)."""
    return _ftkit.run_cli(list(args))
