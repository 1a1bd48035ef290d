# Copyright 2026 The gridauth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the gridauth library."""

import json as _json

from gridauth._core import (
    Fqan,
    FqanPattern,
    GridauthError,
    canonical_check,
    canonical_serialize,
    encode_subject,
    gridmap_emit,
    gridmap_parse,
    is_valid_gridmap_target,
    render_subject,
)
from gridauth import _core


def canonical(obj):
    """Canonical serialization of a JSON-compatible Python value."""
    return canonical_serialize(_json.dumps(obj))


def gate(config_path, request, now):
    """Runs one gatekeeper request; `request` is the canonical request text."""
    return _json.loads(_core.gate(str(config_path), request, now))


__all__ = [
    "Fqan",
    "FqanPattern",
    "GridauthError",
    "canonical",
    "canonical_check",
    "canonical_serialize",
    "encode_subject",
    "gate",
    "gridmap_emit",
    "gridmap_parse",
    "is_valid_gridmap_target",
    "render_subject",
]
